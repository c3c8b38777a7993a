#pragma once

// Univariate difference polynomials f(x; sigma x, ..., sigma^m x), their
// Frobenius specialization g(x) = f(x; x^(p^mf), ...), root-count stability
// along k-schedules, the torus subgroup example, and the sigma-degree probe.

#include <optional>
#include <string>
#include <vector>

#include "froblab/engine.hpp"

namespace froblab {

struct DiffMonomial {
    std::int64_t coeff = 1;
    std::string param;                // optional parameter coefficient, "" = none
    std::vector<std::int64_t> exps;   // exps[j] = exponent of sigma^j(x)
};

struct DiffPoly {
    std::vector<DiffMonomial> monomials;
    int order = 0;  // highest sigma power actually occurring

    // Parses the term grammar (variable x, s(...), integer powers); rejects
    // empty/zero polynomials.
    static DiffPoly parse(const std::string& text);
    static DiffPoly from_term(const TermPtr& term);

    // The equation f = 0 as a difference formula in x.
    FormulaPtr to_formula() const;
    std::string to_string() const;
};

struct RingMonomial {
    std::int64_t coeff = 1;  // reduced mod p
    std::string param;
    u128 exponent = 0;
};

struct RingPoly {
    u64 p = 0;
    std::vector<RingMonomial> monomials;  // merged, coeff != 0 (mod p)
    u128 degree = 0;
    bool zero = false;  // syntactically zero after reduction mod p

    std::string to_string() const;
};

// g(x) = f(x; x^(p^mf), x^(p^(2 mf)), ...): sigma^j x contributes exponent
// p^(j mf) per power.
RingPoly sigma_specialize(const DiffPoly& f, u64 p, int m_frob);

struct RootCountStability {
    RingPoly g;
    struct PerK {
        int k;
        u64 count;
    };
    std::vector<PerK> per_k;
    std::string verdict;  // "bounded" | "degenerate"
};

// Exact root counts of g in GF(p^k) along the schedule: a scan when
// q <= 2^22, else gcd(g, x^q - x) by repeated squaring mod g.
RootCountStability root_count_stability(const DiffPoly& f, u64 p, int m_frob, const std::vector<int>& schedule,
                                        const ParamEnv& params = {}, const EngineOptions& opts = {});

struct TorusReport {
    u64 index = 0;          // (q-1)/|T|
    u64 kernel_size = 0;    // |{x in F^x : x^p = x}|
    u64 subgroup_size = 0;  // |T|, T = {x^(p-1)}
    bool closure_checked = false;  // exhaustive product/inverse closure (q <= 2^14)
    bool closure_ok = true;
};

TorusReport torus_subgroup(const Field& field, const EngineOptions& opts = {});

enum class ProbeVerdict { finite_sigma_degree_consistent, dimension_one_consistent, inconclusive };

struct SigmaDegreeProbe {
    struct PerK {
        int k;
        u64 count;
        double delta;
    };
    std::vector<PerK> per_k;
    ProbeVerdict verdict = ProbeVerdict::inconclusive;
};

// Classifies a quantifier-free one-variable formula by whether its counts
// stay bounded (delta -> 0) or track the field (delta -> 1) along the
// schedule. Consistency evidence only, never a proof.
SigmaDegreeProbe sigma_degree_probe(const FormulaPtr& formula, u64 p, int m, const std::vector<int>& schedule,
                                    const ParamEnv& params = {}, const EngineOptions& opts = {});

const char* probe_verdict_name(ProbeVerdict v);

}  // namespace froblab
