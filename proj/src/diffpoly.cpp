#include "froblab/diffpoly.hpp"

#include <algorithm>
#include <map>

#include "froblab/detail/parallel.hpp"
#include "froblab/detail/polymod.hpp"

namespace froblab {

namespace {

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s += static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

// Expansion monomial: coeff * param * prod_j (sigma^j x)^exps[j].
struct ExpMono {
    std::int64_t coeff = 1;
    std::string param;
    std::vector<std::int64_t> exps;
};

using ExpPoly = std::vector<ExpMono>;

void combine(ExpPoly& poly) {
    std::map<std::pair<std::vector<std::int64_t>, std::string>, std::int64_t> acc;
    for (auto& m : poly) {
        while (!m.exps.empty() && m.exps.back() == 0) m.exps.pop_back();
        auto key = std::make_pair(m.exps, m.param);
        auto [it, fresh] = acc.emplace(key, m.coeff);
        if (!fresh) {
            if (__builtin_add_overflow(it->second, m.coeff, &it->second))
                fail_pre("InvalidArgument", "difference polynomial coefficients overflow");
        }
    }
    poly.clear();
    for (const auto& [key, c] : acc)
        if (c != 0) poly.push_back({c, key.second, key.first});
}

ExpPoly expand(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::var:
            if (t->name != "x")
                fail_pre("InvalidArgument", "difference polynomials are univariate in x; found '" + t->name + "'");
            return {{1, "", {1}}};
        case Term::Kind::int_lit: return t->value == 0 ? ExpPoly{} : ExpPoly{{t->value, "", {}}};
        case Term::Kind::param: return {{1, t->name, {}}};
        case Term::Kind::add: {
            ExpPoly a = expand(t->a), b = expand(t->b);
            a.insert(a.end(), b.begin(), b.end());
            combine(a);
            return a;
        }
        case Term::Kind::sub: {
            ExpPoly a = expand(t->a), b = expand(t->b);
            for (auto& m : b) m.coeff = -m.coeff;
            a.insert(a.end(), b.begin(), b.end());
            combine(a);
            return a;
        }
        case Term::Kind::neg: {
            ExpPoly a = expand(t->a);
            for (auto& m : a) m.coeff = -m.coeff;
            return a;
        }
        case Term::Kind::mul: {
            ExpPoly a = expand(t->a), b = expand(t->b);
            ExpPoly out;
            for (const auto& ma : a) {
                for (const auto& mb : b) {
                    ExpMono m;
                    if (__builtin_mul_overflow(ma.coeff, mb.coeff, &m.coeff))
                        fail_pre("InvalidArgument", "difference polynomial coefficients overflow");
                    if (!ma.param.empty() && !mb.param.empty())
                        fail_pre("InvalidArgument", "products of parameters are not supported as coefficients");
                    m.param = ma.param.empty() ? mb.param : ma.param;
                    m.exps.resize(std::max(ma.exps.size(), mb.exps.size()), 0);
                    for (size_t j = 0; j < ma.exps.size(); ++j) m.exps[j] += ma.exps[j];
                    for (size_t j = 0; j < mb.exps.size(); ++j) m.exps[j] += mb.exps[j];
                    out.push_back(std::move(m));
                }
            }
            combine(out);
            return out;
        }
        case Term::Kind::sigma: {
            ExpPoly a = expand(t->a);
            for (auto& m : a) {
                if (!m.param.empty())
                    fail_pre("InvalidArgument", "sigma applied to a parameter coefficient is not supported");
                std::vector<std::int64_t> shifted(m.exps.size() + static_cast<size_t>(t->value), 0);
                for (size_t j = 0; j < m.exps.size(); ++j) shifted[j + static_cast<size_t>(t->value)] = m.exps[j];
                m.exps = std::move(shifted);
            }
            return a;
        }
        case Term::Kind::frob_pow:
            fail_pre("InvalidArgument", "frob(...) is a ring-formula construct, not a difference polynomial term");
    }
    fail_internal("BadTerm", "unknown term node");
}

}  // namespace

DiffPoly DiffPoly::from_term(const TermPtr& term) {
    ExpPoly poly = expand(term);
    combine(poly);
    if (poly.empty()) fail_pre("InvalidArgument", "the zero polynomial is not a valid difference polynomial");
    DiffPoly f;
    for (auto& m : poly) {
        DiffMonomial dm;
        dm.coeff = m.coeff;
        dm.param = m.param;
        dm.exps = m.exps;
        f.order = std::max(f.order, static_cast<int>(m.exps.size()) - 1);
        f.monomials.push_back(std::move(dm));
    }
    if (f.order < 0) f.order = 0;
    return f;
}

DiffPoly DiffPoly::parse(const std::string& text) { return from_term(parse_term(text)); }

FormulaPtr DiffPoly::to_formula() const {
    TermPtr sum;
    for (const auto& m : monomials) {
        TermPtr prod;
        std::int64_t c = m.coeff;
        bool negate = c < 0;
        if (negate) c = -c;
        if (c != 1 || (m.param.empty() && m.exps.empty())) prod = t_int(c);
        if (!m.param.empty()) {
            TermPtr p = t_param(m.param);
            prod = prod ? t_mul(prod, p) : p;
        }
        for (size_t j = 0; j < m.exps.size(); ++j) {
            for (std::int64_t e = 0; e < m.exps[j]; ++e) {
                TermPtr v = j == 0 ? t_var("x") : t_sigma(static_cast<std::int64_t>(j), t_var("x"));
                prod = prod ? t_mul(prod, v) : v;
            }
        }
        if (negate) prod = t_neg(prod);
        sum = sum ? t_add(sum, prod) : prod;
    }
    return f_eq(sum, t_int(0));
}

std::string DiffPoly::to_string() const {
    FormulaPtr f = to_formula();
    std::string s = print_formula(f);
    // strip the trailing " = 0"
    if (s.size() > 4) s.resize(s.size() - 4);
    return s;
}

RingPoly sigma_specialize(const DiffPoly& f, u64 p, int m_frob) {
    if (m_frob < 1) fail_pre("InvalidFrobPower", "specialization requires m >= 1");
    if (!num::is_prime(p)) fail_pre("NotPrime", std::to_string(p) + " is not prime");
    if (f.monomials.empty()) fail_pre("InvalidArgument", "zero difference polynomial");

    struct Key {
        u128 e;
        std::string param;
        bool operator<(const Key& o) const { return e != o.e ? e < o.e : param < o.param; }
    };
    std::map<Key, std::int64_t> acc;
    const u128 exp_cap = u128(1) << 100;
    for (const auto& m : f.monomials) {
        u128 exponent = 0;
        for (size_t j = 0; j < m.exps.size(); ++j) {
            if (m.exps[j] == 0) continue;
            u128 pw = 1;
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(j) * m_frob; ++i) {
                pw *= p;
                if (pw > exp_cap) fail_pre("DegreeTooLarge", "specialized exponent exceeds 2^100");
            }
            exponent += pw * static_cast<u128>(m.exps[j]);
            if (exponent > exp_cap) fail_pre("DegreeTooLarge", "specialized exponent exceeds 2^100");
        }
        std::int64_t c = m.coeff % static_cast<std::int64_t>(p);
        if (c < 0) c += static_cast<std::int64_t>(p);
        auto [it, fresh] = acc.emplace(Key{exponent, m.param}, c);
        if (!fresh) it->second = (it->second + c) % static_cast<std::int64_t>(p);
    }

    RingPoly g;
    g.p = p;
    for (const auto& [key, c] : acc) {
        if (c == 0 && key.param.empty()) continue;
        g.monomials.push_back({c, key.param, key.e});
        if (key.e > g.degree) g.degree = key.e;
    }
    g.zero = g.monomials.empty();
    return g;
}

std::string RingPoly::to_string() const {
    if (zero) return "0";
    std::string s;
    for (auto it = monomials.rbegin(); it != monomials.rend(); ++it) {
        if (!s.empty()) s += " + ";
        bool coeff_shown = it->coeff != 1 || (it->param.empty() && it->exponent == 0);
        if (coeff_shown) s += std::to_string(it->coeff);
        if (!it->param.empty()) {
            if (coeff_shown) s += "*";
            s += it->param;
            coeff_shown = true;
        }
        if (it->exponent > 0) {
            if (coeff_shown) s += "*";
            s += "x";
            if (it->exponent > 1) s += "^" + u128_to_string(it->exponent);
        }
    }
    return s;
}

namespace {

constexpr u64 kScanLimit = u64(1) << 22;
constexpr u128 kGcdDegreeCap = 2048;

u64 count_roots_in_field(const Field& field, const RingPoly& g, const ParamEnv& params,
                         const EngineOptions& opts, bool& degenerate) {
    // resolve coefficients in this field
    struct Mono {
        u64 coeff;
        u128 exponent;
    };
    std::vector<Mono> monos;
    for (const auto& m : g.monomials) {
        u64 c = field.from_int(m.coeff).idx;
        if (!m.param.empty()) {
            auto it = params.find(m.param);
            if (it == params.end()) fail_pre("MissingParam", "no binding for parameter '" + m.param + "'");
            c = field.mul_idx(c, it->second.resolve(field).idx);
        }
        if (c != 0) monos.push_back({c, m.exponent});
    }
    if (monos.empty()) {  // g vanishes identically in this field
        degenerate = true;
        return field.q();
    }

    u64 q = field.q();
    if (q <= kScanLimit) {
        std::vector<std::pair<u64, u64>> reduced;  // (coeff, exponent mod q-1), exponent > 0
        u64 const_term = 0;
        u64 zero_value = 0;  // g(0)
        for (const auto& m : monos) {
            if (m.exponent == 0) {
                const_term = field.add_idx(const_term, m.coeff);
                zero_value = field.add_idx(zero_value, m.coeff);
            } else {
                reduced.push_back({m.coeff, static_cast<u64>(m.exponent % (q - 1))});
            }
        }
        auto accs = detail::parallel_blocks<u64>(q - 1, opts.workers, 0, [&](u64 lo, u64 hi, u64& acc) {
            for (u64 i = lo; i < hi; ++i) {
                u64 x = i + 1;  // nonzero elements
                u64 v = const_term;
                for (const auto& [c, e] : reduced)
                    v = field.add_idx(v, field.mul_idx(c, field.pow_reduced_idx(x, e)));
                if (v == 0) ++acc;
            }
        });
        u64 cnt = zero_value == 0 ? 1 : 0;
        for (u64 a : accs) cnt += a;
        return cnt;
    }

    // gcd route: deg gcd(g, x^q - x) over F_p equals the number of distinct
    // roots of g in GF(q); needs prime-subfield coefficients.
    if (g.degree > kGcdDegreeCap)
        fail_budget("root counting beyond the scan limit needs degree <= " + std::to_string(static_cast<u64>(kGcdDegreeCap)));
    for (const auto& m : monos)
        if (m.coeff >= field.p())
            fail_budget("root counting beyond the scan limit needs prime-subfield coefficients");
    detail::Digits gd(static_cast<size_t>(g.degree) + 1, 0);
    for (const auto& m : monos)
        gd[static_cast<size_t>(m.exponent)] = (gd[static_cast<size_t>(m.exponent)] + m.coeff) % field.p();
    detail::Digits xq = detail::x_power_mod(q, gd, field.p());  // x^q mod g
    if (xq.size() < 2) xq.resize(2, 0);
    xq[1] = (xq[1] + field.p() - 1) % field.p();  // x^q - x mod g
    if (detail::degree(xq) < 0) return static_cast<u64>(detail::degree(gd));  // g | x^q - x
    int d = detail::gcd_degree(gd, xq, field.p());
    return d < 0 ? 0 : static_cast<u64>(d);
}

}  // namespace

RootCountStability root_count_stability(const DiffPoly& f, u64 p, int m_frob, const std::vector<int>& schedule,
                                        const ParamEnv& params, const EngineOptions& opts) {
    if (schedule.empty()) fail_pre("InvalidSchedule", "schedule must be nonempty");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) fail_pre("InvalidSchedule", "schedule must be strictly increasing");

    RootCountStability r;
    r.g = sigma_specialize(f, p, m_frob);
    bool degenerate = r.g.zero;
    for (int k : schedule) {
        auto field = make_field(p, k, m_frob);
        u64 cnt;
        if (r.g.zero) {
            cnt = field->q();
        } else {
            cnt = count_roots_in_field(*field, r.g, params, opts, degenerate);
        }
        r.per_k.push_back({k, cnt});
    }
    r.verdict = degenerate ? "degenerate" : "bounded";
    return r;
}

TorusReport torus_subgroup(const Field& field, const EngineOptions& opts) {
    if (field.frob_power() != 1)
        fail_pre("InvalidFrobPower", "the torus example is stated for m = 1");
    u64 q = field.q();
    u64 ord = q - 1;
    u64 e = (field.p() - 1) % ord;  // x -> x^(p-1) on F^x

    std::vector<bool> image(q, false);
    u64 kernel = 0;
    for (u64 x = 1; x < q; ++x) {
        image[field.pow_reduced_idx(x, e)] = true;
        if (field.frobenius_pow_idx(x, 1) == x) ++kernel;
    }
    std::vector<u64> t_list;
    for (u64 v = 1; v < q; ++v)
        if (image[v]) t_list.push_back(v);

    TorusReport r;
    r.kernel_size = kernel;
    r.subgroup_size = t_list.size();
    if (r.subgroup_size == 0 || ord % r.subgroup_size != 0)
        fail_internal("NotSubgroup", "image size does not divide the group order");
    r.index = ord / r.subgroup_size;

    if (q <= (u64(1) << 14)) {
        r.closure_checked = true;
        for (u64 a : t_list) {
            if (!image[field.inv_idx(a)]) { r.closure_ok = false; break; }
            for (u64 b : t_list)
                if (!image[field.mul_idx(a, b)]) { r.closure_ok = false; break; }
            if (!r.closure_ok) break;
        }
    }
    (void)opts;
    return r;
}

SigmaDegreeProbe sigma_degree_probe(const FormulaPtr& formula, u64 p, int m, const std::vector<int>& schedule,
                                    const ParamEnv& params, const EngineOptions& opts) {
    if (has_quantifier(formula)) fail_pre("NotQuantifierFree", "the probe takes quantifier-free formulas");
    if (schedule.size() < 2) fail_pre("InvalidSchedule", "the probe needs a schedule of length >= 2");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) fail_pre("InvalidSchedule", "schedule must be strictly increasing");
    {
        std::set<std::string> names;
        for (const auto& [name, spec] : params) names.insert(name);
        auto fv = free_vars(mark_params(formula, names));
        if (fv.size() != 1)
            fail_pre("InvalidArgument", "the probe takes formulas with exactly one free variable");
    }

    SigmaDegreeProbe r;
    for (int k : schedule) {
        auto field = make_field(p, k, m);
        CountReport c = count(*field, formula, params, opts);
        r.per_k.push_back({k, c.count, c.count == 0 ? 0.0 : c.normalized});
    }
    double last = r.per_k.back().delta;
    double prev = r.per_k[r.per_k.size() - 2].delta;
    if (last < 0.2 && last <= prev + 1e-12) {
        r.verdict = ProbeVerdict::finite_sigma_degree_consistent;
    } else if (last > 0.8 && last >= prev - 1e-12) {
        r.verdict = ProbeVerdict::dimension_one_consistent;
    } else {
        r.verdict = ProbeVerdict::inconclusive;
    }
    return r;
}

const char* probe_verdict_name(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::finite_sigma_degree_consistent: return "finite-sigma-degree-consistent";
        case ProbeVerdict::dimension_one_consistent: return "dimension-1-consistent";
        case ProbeVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

}  // namespace froblab
