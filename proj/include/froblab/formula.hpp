#pragma once

// First-order difference-ring formulas: abstract syntax, parsing, printing,
// and Frobenius specialization (sigma^j(t) -> t^(p^(j m))).
//
// Concrete grammar (ASCII):
//   formula := implies
//   implies := or ('->' implies)?
//   or      := and ('|' and)*
//   and     := unary ('&' unary)*
//   unary   := '!' unary | ('E'|'A') ident '.' formula | atom
//   atom    := '(' formula ')' | term ('=' | '!=') term
//   term    := factor (('+'|'-') factor)*
//   factor  := power ('*' power)*
//   power   := base ('^' nat)?          integer powers desugar to products
//   base    := '-' base | nat | ident | 's' '(' term ')' | 's' '^' nat '(' term ')'
//            | 'frob' '(' term ')' | 'frob' '^' nat '(' term ')' | '(' term ')'
// 's', 'frob', 'E' and 'A' are reserved. 'frob^e(t)' denotes t^(p^e) and
// appears in specialized ring formulas.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "froblab/errors.hpp"
#include "froblab/field.hpp"

namespace froblab {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { var, int_lit, param, add, sub, mul, neg, sigma, frob_pow };
    Kind kind;
    std::string name;        // var, param
    std::int64_t value = 0;  // int_lit value; sigma power j >= 1; frob_pow exponent e >= 0
    TermPtr a, b;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { eq, conj, disj, neg, implies, exists, forall };
    Kind kind;
    TermPtr t1, t2;   // eq
    std::string var;  // quantifiers
    FormulaPtr f1, f2;
};

// ---- constructors ----
TermPtr t_var(std::string name);
TermPtr t_int(std::int64_t v);
TermPtr t_param(std::string name);
TermPtr t_add(TermPtr a, TermPtr b);
TermPtr t_sub(TermPtr a, TermPtr b);
TermPtr t_mul(TermPtr a, TermPtr b);
TermPtr t_neg(TermPtr a);
TermPtr t_sigma(std::int64_t power, TermPtr a);
TermPtr t_frob(TermPtr a, std::int64_t e);

FormulaPtr f_eq(TermPtr a, TermPtr b);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_forall(std::string var, FormulaPtr body);

// Parses the concrete grammar; errors carry line/column. Shadowed quantifier
// variables are rejected with UnboundVariable.
FormulaPtr parse_formula(const std::string& text);
TermPtr parse_term(const std::string& text);

std::string print_formula(const FormulaPtr& f);
std::string print_term(const TermPtr& t);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// Free variables in first-occurrence order (params are not variables).
std::vector<std::string> free_vars(const FormulaPtr& f);
bool has_sigma(const FormulaPtr& f);
bool has_quantifier(const FormulaPtr& f);

// Rewrites free occurrences of the named variables into param nodes.
FormulaPtr mark_params(const FormulaPtr& f, const std::set<std::string>& params);

// Frobenius specialization: each sigma(j, t) becomes frob_pow(t', j*m). The
// result is a ring formula (no sigma nodes); structure is otherwise preserved.
FormulaPtr specialize(const FormulaPtr& f, u64 p, int m);

// ---- parameter bindings ----

struct ParamSpec {
    enum class Kind { int_const, generator, nonsquare, elem_index };
    Kind kind = Kind::int_const;
    std::int64_t value = 0;  // int_const / elem_index

    static ParamSpec int_const(std::int64_t v) { return {Kind::int_const, v}; }
    static ParamSpec generator() { return {Kind::generator, 0}; }
    static ParamSpec nonsquare() { return {Kind::nonsquare, 0}; }
    static ParamSpec elem_index(std::int64_t v) { return {Kind::elem_index, v}; }

    bool schedule_stable() const { return kind != Kind::elem_index; }
    Elem resolve(const Field& f) const;
    std::string to_string() const;
};

using ParamEnv = std::map<std::string, ParamSpec>;

// Checks alpha-validity and that every param node has a binding.
void validate(const FormulaPtr& f, const ParamEnv& env);

}  // namespace froblab
