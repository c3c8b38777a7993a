#include "froblab/formula.hpp"

#include <cctype>
#include <sstream>

namespace froblab {

// ---- constructors ----

namespace {
TermPtr mk_term(Term t) { return std::make_shared<const Term>(std::move(t)); }
FormulaPtr mk_formula(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
}  // namespace

TermPtr t_var(std::string name) { return mk_term({Term::Kind::var, std::move(name), 0, nullptr, nullptr}); }
TermPtr t_int(std::int64_t v) {
    if (v < 0) fail_pre("ParseError", "integer literals must be nonnegative; use unary minus");
    return mk_term({Term::Kind::int_lit, "", v, nullptr, nullptr});
}
TermPtr t_param(std::string name) { return mk_term({Term::Kind::param, std::move(name), 0, nullptr, nullptr}); }
TermPtr t_add(TermPtr a, TermPtr b) { return mk_term({Term::Kind::add, "", 0, std::move(a), std::move(b)}); }
TermPtr t_sub(TermPtr a, TermPtr b) { return mk_term({Term::Kind::sub, "", 0, std::move(a), std::move(b)}); }
TermPtr t_mul(TermPtr a, TermPtr b) { return mk_term({Term::Kind::mul, "", 0, std::move(a), std::move(b)}); }
TermPtr t_neg(TermPtr a) { return mk_term({Term::Kind::neg, "", 0, std::move(a), nullptr}); }
TermPtr t_sigma(std::int64_t power, TermPtr a) {
    if (power < 1) fail_pre("ParseError", "sigma power must be >= 1");
    return mk_term({Term::Kind::sigma, "", power, std::move(a), nullptr});
}
TermPtr t_frob(TermPtr a, std::int64_t e) {
    if (e < 0) fail_pre("ParseError", "frobenius exponent must be >= 0");
    return mk_term({Term::Kind::frob_pow, "", e, std::move(a), nullptr});
}

FormulaPtr f_eq(TermPtr a, TermPtr b) { return mk_formula({Formula::Kind::eq, std::move(a), std::move(b), "", nullptr, nullptr}); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return mk_formula({Formula::Kind::conj, nullptr, nullptr, "", std::move(a), std::move(b)}); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return mk_formula({Formula::Kind::disj, nullptr, nullptr, "", std::move(a), std::move(b)}); }
FormulaPtr f_not(FormulaPtr a) { return mk_formula({Formula::Kind::neg, nullptr, nullptr, "", std::move(a), nullptr}); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return mk_formula({Formula::Kind::implies, nullptr, nullptr, "", std::move(a), std::move(b)}); }
FormulaPtr f_exists(std::string var, FormulaPtr body) { return mk_formula({Formula::Kind::exists, nullptr, nullptr, std::move(var), std::move(body), nullptr}); }
FormulaPtr f_forall(std::string var, FormulaPtr body) { return mk_formula({Formula::Kind::forall, nullptr, nullptr, std::move(var), std::move(body), nullptr}); }

// ---- lexer / parser ----

namespace {

struct Token {
    enum class Kind { ident, nat, lparen, rparen, eq, neq, amp, pipe, bang, arrow, plus, minus, star, caret, dot, end };
    Kind kind;
    std::string text;
    std::int64_t value = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(&s) { advance(); }
    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_->size() && std::isspace(static_cast<unsigned char>((*s_)[pos_]))) bump();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_->size()) { tok_.kind = Token::Kind::end; return; }
        char c = (*s_)[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (pos_ < s_->size() && (std::isalnum(static_cast<unsigned char>((*s_)[pos_])) || (*s_)[pos_] == '_')) {
                id += (*s_)[pos_];
                bump();
            }
            tok_.kind = Token::Kind::ident;
            tok_.text = std::move(id);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (pos_ < s_->size() && std::isdigit(static_cast<unsigned char>((*s_)[pos_]))) {
                int d = (*s_)[pos_] - '0';
                if (v > (INT64_MAX - d) / 10) err("integer literal too large");
                v = v * 10 + d;
                bump();
            }
            tok_.kind = Token::Kind::nat;
            tok_.value = v;
            return;
        }
        bump();
        switch (c) {
            case '(': tok_.kind = Token::Kind::lparen; return;
            case ')': tok_.kind = Token::Kind::rparen; return;
            case '=': tok_.kind = Token::Kind::eq; return;
            case '&': tok_.kind = Token::Kind::amp; return;
            case '|': tok_.kind = Token::Kind::pipe; return;
            case '+': tok_.kind = Token::Kind::plus; return;
            case '*': tok_.kind = Token::Kind::star; return;
            case '^': tok_.kind = Token::Kind::caret; return;
            case '.': tok_.kind = Token::Kind::dot; return;
            case '!':
                if (pos_ < s_->size() && (*s_)[pos_] == '=') {
                    bump();
                    tok_.kind = Token::Kind::neq;
                } else {
                    tok_.kind = Token::Kind::bang;
                }
                return;
            case '-':
                if (pos_ < s_->size() && (*s_)[pos_] == '>') {
                    bump();
                    tok_.kind = Token::Kind::arrow;
                } else {
                    tok_.kind = Token::Kind::minus;
                }
                return;
            default: err(std::string("unexpected character '") + c + "'");
        }
    }

    void bump() {
        if ((*s_)[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    [[noreturn]] void err(const std::string& msg) {
        fail_pre("ParseError", "line " + std::to_string(line_) + " col " + std::to_string(col_) + ": " + msg);
    }

    const std::string* s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

constexpr std::int64_t kMaxDesugaredPower = 4096;

class Parser {
public:
    explicit Parser(const std::string& s) : lex_(s) {}

    FormulaPtr formula_all() {
        FormulaPtr f = implies();
        expect_end();
        return f;
    }

    TermPtr term_all() {
        TermPtr t = term();
        expect_end();
        return t;
    }

private:
    FormulaPtr implies() {
        FormulaPtr lhs = disj();
        if (peek_is(Token::Kind::arrow)) {
            lex_.next();
            return f_implies(std::move(lhs), implies());
        }
        return lhs;
    }

    FormulaPtr disj() {
        FormulaPtr f = conj();
        while (peek_is(Token::Kind::pipe)) {
            lex_.next();
            f = f_or(std::move(f), conj());
        }
        return f;
    }

    FormulaPtr conj() {
        FormulaPtr f = unary();
        while (peek_is(Token::Kind::amp)) {
            lex_.next();
            f = f_and(std::move(f), unary());
        }
        return f;
    }

    FormulaPtr unary() {
        if (peek_is(Token::Kind::bang)) {
            lex_.next();
            return f_not(unary());
        }
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::ident && (t.text == "E" || t.text == "A")) {
            bool exists = t.text == "E";
            lex_.next();
            Token v = lex_.next();
            if (v.kind != Token::Kind::ident || reserved(v.text))
                err(v, "expected a variable name after quantifier");
            if (bound_.count(v.text))
                fail_pre("UnboundVariable", "quantifier illegally shadows '" + v.text + "'");
            expect(Token::Kind::dot, "'.' after quantified variable");
            bound_.insert(v.text);
            FormulaPtr body = implies();
            bound_.erase(v.text);
            return exists ? f_exists(v.text, std::move(body)) : f_forall(v.text, std::move(body));
        }
        return atom();
    }

    FormulaPtr atom() {
        if (peek_is(Token::Kind::lparen)) {
            // Could be a parenthesized formula or a parenthesized term; try
            // the formula first by scanning is unreliable, so parse a term
            // and fall back via lookahead: a '(' at formula level always
            // starts a formula in this grammar except when the atom is
            // "(term) = term". Parse a full term expression; if the next
            // token is a comparison we are in the term case, otherwise we
            // must have consumed a parenthesized formula -- so instead,
            // handle it by trying the formula parse directly.
            Lexer save = lex_;
            auto saved_bound = bound_;
            lex_.next();
            try {
                FormulaPtr f = implies();
                expect(Token::Kind::rparen, "')'");
                if (peek_is(Token::Kind::eq) || peek_is(Token::Kind::neq)) throw RetryAsTerm{};
                return f;
            } catch (const RetryAsTerm&) {
                lex_ = save;
                bound_ = saved_bound;
            } catch (const Error&) {
                lex_ = save;
                bound_ = saved_bound;
            }
        }
        TermPtr lhs = term();
        if (peek_is(Token::Kind::neq)) {
            lex_.next();
            return f_not(f_eq(std::move(lhs), term()));
        }
        expect(Token::Kind::eq, "'=' or '!=' between terms");
        return f_eq(std::move(lhs), term());
    }

    TermPtr term() {
        TermPtr t = factor();
        while (peek_is(Token::Kind::plus) || peek_is(Token::Kind::minus)) {
            bool plus = lex_.next().kind == Token::Kind::plus;
            TermPtr rhs = factor();
            t = plus ? t_add(std::move(t), std::move(rhs)) : t_sub(std::move(t), std::move(rhs));
        }
        return t;
    }

    TermPtr factor() {
        TermPtr t = power();
        while (peek_is(Token::Kind::star)) {
            lex_.next();
            t = t_mul(std::move(t), power());
        }
        return t;
    }

    TermPtr power() {
        TermPtr t = base();
        if (peek_is(Token::Kind::caret)) {
            Token c = lex_.next();
            Token n = lex_.next();
            if (n.kind != Token::Kind::nat) err(c, "expected an integer exponent after '^'");
            if (n.value > kMaxDesugaredPower) err(n, "integer power too large");
            if (n.value == 0) return t_int(1);
            TermPtr r = t;
            for (std::int64_t i = 1; i < n.value; ++i) r = t_mul(std::move(r), t);
            return r;
        }
        return t;
    }

    TermPtr base() {
        Token t = lex_.next();
        switch (t.kind) {
            case Token::Kind::minus: return t_neg(base());
            case Token::Kind::nat: return t_int(t.value);
            case Token::Kind::lparen: {
                TermPtr inner = term();
                expect(Token::Kind::rparen, "')'");
                return inner;
            }
            case Token::Kind::ident: {
                if (t.text == "s" || t.text == "frob") {
                    std::int64_t power = 1;
                    if (peek_is(Token::Kind::caret)) {
                        lex_.next();
                        Token n = lex_.next();
                        if (n.kind != Token::Kind::nat) err(n, "expected an integer after '^'");
                        power = n.value;
                    }
                    expect(Token::Kind::lparen, "'(' after '" + t.text + "'");
                    TermPtr inner = term();
                    expect(Token::Kind::rparen, "')'");
                    return t.text == "s" ? t_sigma(power, std::move(inner)) : t_frob(std::move(inner), power);
                }
                if (reserved(t.text)) err(t, "'" + t.text + "' is reserved");
                return t_var(t.text);
            }
            default: err(t, "expected a term");
        }
    }

    struct RetryAsTerm {};

    static bool reserved(const std::string& s) { return s == "E" || s == "A" || s == "s" || s == "frob"; }

    bool peek_is(Token::Kind k) const { return lex_.peek().kind == k; }

    void expect(Token::Kind k, const std::string& what) {
        Token t = lex_.next();
        if (t.kind != k) err(t, "expected " + what);
    }

    void expect_end() {
        if (!peek_is(Token::Kind::end)) err(lex_.peek(), "trailing input");
    }

    [[noreturn]] void err(const Token& t, const std::string& msg) {
        fail_pre("ParseError", "line " + std::to_string(t.line) + " col " + std::to_string(t.col) + ": " + msg);
    }

    Lexer lex_;
    std::set<std::string> bound_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).formula_all(); }
TermPtr parse_term(const std::string& text) { return Parser(text).term_all(); }

// ---- printing ----

namespace {

// term precedence: add/sub 1, mul 2, neg 3, atoms 4
int term_prec(const Term& t) {
    switch (t.kind) {
        case Term::Kind::add:
        case Term::Kind::sub: return 1;
        case Term::Kind::mul: return 2;
        case Term::Kind::neg: return 3;
        default: return 4;
    }
}

void print_term_rec(const TermPtr& t, int min_prec, std::string& out) {
    bool parens = term_prec(*t) < min_prec;
    if (parens) out += "(";
    switch (t->kind) {
        case Term::Kind::var:
        case Term::Kind::param: out += t->name; break;
        case Term::Kind::int_lit: out += std::to_string(t->value); break;
        case Term::Kind::add:
            print_term_rec(t->a, 1, out);
            out += " + ";
            print_term_rec(t->b, 2, out);
            break;
        case Term::Kind::sub:
            print_term_rec(t->a, 1, out);
            out += " - ";
            print_term_rec(t->b, 2, out);
            break;
        case Term::Kind::mul:
            print_term_rec(t->a, 2, out);
            out += " * ";
            print_term_rec(t->b, 3, out);
            break;
        case Term::Kind::neg:
            out += "-";
            print_term_rec(t->a, 3, out);
            break;
        case Term::Kind::sigma:
            out += t->value == 1 ? "s" : "s^" + std::to_string(t->value);
            out += "(";
            print_term_rec(t->a, 1, out);
            out += ")";
            break;
        case Term::Kind::frob_pow:
            out += t->value == 1 ? "frob" : "frob^" + std::to_string(t->value);
            out += "(";
            print_term_rec(t->a, 1, out);
            out += ")";
            break;
    }
    if (parens) out += ")";
}

// formula precedence: implies 1, or 2, and 3, not/quantifier 4, eq 5
int formula_prec(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::implies: return 1;
        case Formula::Kind::disj: return 2;
        case Formula::Kind::conj: return 3;
        case Formula::Kind::neg:
        case Formula::Kind::exists:
        case Formula::Kind::forall: return 4;
        case Formula::Kind::eq: return 5;
    }
    return 5;
}

// `open` reports whether the printed text ends inside a quantifier scope that
// would capture any following connective; such children get parenthesized
// unless they sit in absolute tail position (can_open).
bool print_formula_rec(const FormulaPtr& f, int min_prec, bool can_open, std::string& out) {
    std::string s;
    bool open = false;
    switch (f->kind) {
        case Formula::Kind::eq:
            print_term_rec(f->t1, 1, s);
            s += " = ";
            print_term_rec(f->t2, 1, s);
            break;
        case Formula::Kind::neg:
            if (f->f1 && f->f1->kind == Formula::Kind::eq) {  // print as '!=' sugar
                print_term_rec(f->f1->t1, 1, s);
                s += " != ";
                print_term_rec(f->f1->t2, 1, s);
            } else {
                s += "!";
                open = print_formula_rec(f->f1, 4, can_open, s);
            }
            break;
        case Formula::Kind::conj:
            print_formula_rec(f->f1, 3, false, s);
            s += " & ";
            open = print_formula_rec(f->f2, 4, can_open, s);
            break;
        case Formula::Kind::disj:
            print_formula_rec(f->f1, 2, false, s);
            s += " | ";
            open = print_formula_rec(f->f2, 3, can_open, s);
            break;
        case Formula::Kind::implies:
            print_formula_rec(f->f1, 2, false, s);
            s += " -> ";
            open = print_formula_rec(f->f2, 1, can_open, s);
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            s += f->kind == Formula::Kind::exists ? "E " : "A ";
            s += f->var;
            s += ". ";
            print_formula_rec(f->f1, 1, true, s);
            open = true;
            break;
    }
    if (formula_prec(*f) < min_prec || (open && !can_open)) {
        out += "(";
        out += s;
        out += ")";
        return false;
    }
    out += s;
    return open;
}

}  // namespace

std::string print_term(const TermPtr& t) {
    std::string out;
    print_term_rec(t, 1, out);
    return out;
}

std::string print_formula(const FormulaPtr& f) {
    std::string out;
    print_formula_rec(f, 1, true, out);
    return out;
}

// ---- structural equality ----

bool term_equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->name != b->name || a->value != b->value) return false;
    return term_equal(a->a, b->a) && term_equal(a->b, b->b);
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->var != b->var) return false;
    return term_equal(a->t1, b->t1) && term_equal(a->t2, b->t2) && formula_equal(a->f1, b->f1) &&
           formula_equal(a->f2, b->f2);
}

// ---- analysis ----

namespace {

void term_free_vars(const TermPtr& t, const std::set<std::string>& bound, std::vector<std::string>& out,
                    std::set<std::string>& seen) {
    if (!t) return;
    if (t->kind == Term::Kind::var && !bound.count(t->name) && !seen.count(t->name)) {
        seen.insert(t->name);
        out.push_back(t->name);
    }
    term_free_vars(t->a, bound, out, seen);
    term_free_vars(t->b, bound, out, seen);
}

void formula_free_vars(const FormulaPtr& f, std::set<std::string>& bound, std::vector<std::string>& out,
                       std::set<std::string>& seen) {
    if (!f) return;
    switch (f->kind) {
        case Formula::Kind::eq:
            term_free_vars(f->t1, bound, out, seen);
            term_free_vars(f->t2, bound, out, seen);
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall: {
            bool inserted = bound.insert(f->var).second;
            formula_free_vars(f->f1, bound, out, seen);
            if (inserted) bound.erase(f->var);
            break;
        }
        default:
            formula_free_vars(f->f1, bound, out, seen);
            formula_free_vars(f->f2, bound, out, seen);
    }
}

bool term_has_sigma(const TermPtr& t) {
    if (!t) return false;
    if (t->kind == Term::Kind::sigma) return true;
    return term_has_sigma(t->a) || term_has_sigma(t->b);
}

}  // namespace

std::vector<std::string> free_vars(const FormulaPtr& f) {
    std::vector<std::string> out;
    std::set<std::string> bound, seen;
    formula_free_vars(f, bound, out, seen);
    return out;
}

bool has_sigma(const FormulaPtr& f) {
    if (!f) return false;
    if (f->kind == Formula::Kind::eq) return term_has_sigma(f->t1) || term_has_sigma(f->t2);
    return has_sigma(f->f1) || has_sigma(f->f2);
}

bool has_quantifier(const FormulaPtr& f) {
    if (!f) return false;
    if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall) return true;
    if (f->kind == Formula::Kind::eq) return false;
    return has_quantifier(f->f1) || has_quantifier(f->f2);
}

// ---- param marking ----

namespace {

TermPtr mark_params_term(const TermPtr& t, const std::set<std::string>& params, const std::set<std::string>& bound) {
    if (!t) return t;
    if (t->kind == Term::Kind::var && params.count(t->name) && !bound.count(t->name)) return t_param(t->name);
    TermPtr a = mark_params_term(t->a, params, bound);
    TermPtr b = mark_params_term(t->b, params, bound);
    if (a == t->a && b == t->b) return t;
    Term copy = *t;
    copy.a = std::move(a);
    copy.b = std::move(b);
    return std::make_shared<const Term>(std::move(copy));
}

FormulaPtr mark_params_rec(const FormulaPtr& f, const std::set<std::string>& params, std::set<std::string>& bound) {
    if (!f) return f;
    Formula copy = *f;
    switch (f->kind) {
        case Formula::Kind::eq:
            copy.t1 = mark_params_term(f->t1, params, bound);
            copy.t2 = mark_params_term(f->t2, params, bound);
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall: {
            bool inserted = bound.insert(f->var).second;
            copy.f1 = mark_params_rec(f->f1, params, bound);
            if (inserted) bound.erase(f->var);
            break;
        }
        default:
            copy.f1 = mark_params_rec(f->f1, params, bound);
            copy.f2 = mark_params_rec(f->f2, params, bound);
    }
    if (copy.t1 == f->t1 && copy.t2 == f->t2 && copy.f1 == f->f1 && copy.f2 == f->f2) return f;
    return std::make_shared<const Formula>(std::move(copy));
}

}  // namespace

FormulaPtr mark_params(const FormulaPtr& f, const std::set<std::string>& params) {
    std::set<std::string> bound;
    return mark_params_rec(f, params, bound);
}

// ---- specialization ----

namespace {

TermPtr specialize_term(const TermPtr& t, int m) {
    if (!t) return t;
    if (t->kind == Term::Kind::sigma) return t_frob(specialize_term(t->a, m), t->value * m);
    TermPtr a = specialize_term(t->a, m);
    TermPtr b = specialize_term(t->b, m);
    if (a == t->a && b == t->b) return t;
    Term copy = *t;
    copy.a = std::move(a);
    copy.b = std::move(b);
    return std::make_shared<const Term>(std::move(copy));
}

}  // namespace

FormulaPtr specialize(const FormulaPtr& f, u64 p, int m) {
    if (m < 1) fail_pre("InvalidFrobPower", "specialization requires m >= 1");
    if (!num::is_prime(p)) fail_pre("NotPrime", std::to_string(p) + " is not prime");
    if (!f) return f;
    Formula copy = *f;
    if (f->kind == Formula::Kind::eq) {
        copy.t1 = specialize_term(f->t1, m);
        copy.t2 = specialize_term(f->t2, m);
    } else {
        copy.f1 = specialize(f->f1, p, m);
        copy.f2 = specialize(f->f2, p, m);
    }
    if (copy.t1 == f->t1 && copy.t2 == f->t2 && copy.f1 == f->f1 && copy.f2 == f->f2) return f;
    return std::make_shared<const Formula>(std::move(copy));
}

// ---- params & validation ----

Elem ParamSpec::resolve(const Field& f) const {
    switch (kind) {
        case Kind::int_const: return f.from_int(value);
        case Kind::generator: return f.find_generator();
        case Kind::nonsquare: return f.find_nonsquare();
        case Kind::elem_index:
            if (value < 0 || static_cast<u64>(value) >= f.q())
                fail_pre("ElemIndexOutOfRange",
                         "element index " + std::to_string(value) + " invalid for q=" + std::to_string(f.q()));
            return f.elem(static_cast<u64>(value));
    }
    fail_internal("BadParamSpec", "unknown param kind");
}

std::string ParamSpec::to_string() const {
    switch (kind) {
        case Kind::int_const: return "int:" + std::to_string(value);
        case Kind::generator: return "gen";
        case Kind::nonsquare: return "nonsq";
        case Kind::elem_index: return "idx:" + std::to_string(value);
    }
    return "?";
}

namespace {

void validate_term(const TermPtr& t, const ParamEnv& env) {
    if (!t) return;
    if (t->kind == Term::Kind::param && !env.count(t->name))
        fail_pre("MissingParam", "no binding for parameter '" + t->name + "'");
    validate_term(t->a, env);
    validate_term(t->b, env);
}

void validate_rec(const FormulaPtr& f, const ParamEnv& env, std::set<std::string>& bound) {
    if (!f) return;
    switch (f->kind) {
        case Formula::Kind::eq:
            validate_term(f->t1, env);
            validate_term(f->t2, env);
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            if (!bound.insert(f->var).second)
                fail_pre("ShadowedVariable", "variable '" + f->var + "' is shadowed");
            validate_rec(f->f1, env, bound);
            bound.erase(f->var);
            break;
        default:
            validate_rec(f->f1, env, bound);
            validate_rec(f->f2, env, bound);
    }
}

}  // namespace

void validate(const FormulaPtr& f, const ParamEnv& env) {
    std::set<std::string> bound;
    validate_rec(f, env, bound);
}

}  // namespace froblab
