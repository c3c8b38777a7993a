#include "froblab/dimension.hpp"

#include <chrono>
#include <cmath>

namespace froblab {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DimensionEstimate estimate_dimension(u64 p, const std::vector<int>& schedule, int m, const FormulaPtr& formula,
                                     const ParamEnv& params, double tolerance, const EngineOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    if (schedule.empty()) fail_pre("InvalidSchedule", "schedule must be nonempty");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) fail_pre("InvalidSchedule", "schedule must be strictly increasing");
    for (const auto& [name, spec] : params)
        if (!spec.schedule_stable())
            fail_pre("UnstableParam", "parameter '" + name + "' uses an idx binding, which is not schedule-stable");

    DimensionEstimate est;
    est.p = p;
    est.m = m;
    est.tolerance = tolerance;

    for (int k : schedule) {
        auto field = make_field(p, k, m);
        CountReport r;
        try {
            r = count(*field, formula, params, opts);
        } catch (const Error& e) {
            if (e.category() == ErrorCategory::budget) fail_budget("at k=" + std::to_string(k) + ": " + e.what());
            throw;
        }
        est.n_free = r.n_free;
        double delta = r.count == 0 ? 0.0 : r.normalized;
        est.per_k.push_back({k, r.count, delta});
    }

    double last = est.per_k.back().delta;
    long fitted = std::lround(last);
    if (fitted < 0) fitted = 0;
    if (fitted > est.n_free) fitted = est.n_free;
    est.fitted_dim = static_cast<int>(fitted);
    est.residual = std::fabs(last - static_cast<double>(fitted));

    est.divergent = est.per_k.back().count == 0 || est.residual >= tolerance;
    if (!est.divergent) {
        // residuals must shrink (weakly) toward the fitted integer
        double prev = std::fabs(est.per_k.front().delta - static_cast<double>(fitted));
        for (size_t i = 1; i < est.per_k.size(); ++i) {
            double cur = std::fabs(est.per_k[i].delta - static_cast<double>(fitted));
            if (cur > prev + 1e-12) { est.divergent = true; break; }
            prev = cur;
        }
    }
    est.elapsed_ms = ms_since(t0);
    return est;
}

ThetaReport theta_test(const Field& field, const FormulaPtr& psi, const ParamEnv& params,
                       const EngineOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<u64> sat = satisfying_set(field, psi, params, opts);
    u64 q = field.q();

    ThetaReport r;
    r.card = sat.size();
    r.q = q;

    Budget budget(opts.budget);
    if (sat.size() >= 2) {
        // difference set D = {a - b}, then quotients D * (D \ {0})^{-1}
        std::vector<bool> in_d(q, false);
        std::vector<u64> d_list;
        u64 d_count = 0;
        for (u64 a : sat) {
            for (u64 b : sat) {
                u64 d = field.sub_idx(a, b);
                if (!in_d[d]) {
                    in_d[d] = true;
                    d_list.push_back(d);
                    ++d_count;
                }
            }
            budget.add(sat.size());
            if (d_count == q) break;
        }
        std::vector<bool> covered(q, false);
        u64 cover_count = 0;
        for (u64 e : d_list) {
            if (e == 0) continue;
            u64 inv_e = field.inv_idx(e);
            for (u64 d : d_list) {
                u64 z = field.mul_idx(d, inv_e);
                if (!covered[z]) {
                    covered[z] = true;
                    ++cover_count;
                }
            }
            budget.add(d_list.size());
            if (cover_count == q) break;
        }
        r.theta_holds = cover_count == q;
    } else {
        r.theta_holds = false;  // no pair x3 != x4
    }

    // Exact dichotomy (Cauchy-Davenport-free, purely set-theoretic): a
    // surjective quotient map forces card^4 >= q; a missing quotient value a
    // makes (x1, x2) -> x1 + a x2 injective, so card^2 <= q.
    u128 c = r.card;
    if (r.theta_holds) {
        if (c * c * c * c < q) fail_internal("DichotomyViolated", "theta holds but card^4 < q");
    } else {
        if (c * c > q) fail_internal("DichotomyViolated", "theta fails but card^2 > q");
    }
    r.elapsed_ms = ms_since(t0);
    return r;
}

SubadditivityReport check_subadditivity(const Field& field, const FormulaPtr& formula,
                                        const std::vector<std::string>& x_block,
                                        const std::vector<std::string>& y_block, const ParamEnv& params,
                                        const EngineOptions& opts) {
    SubadditivityReport r;
    r.fibers = fiber_counts(field, formula, x_block, y_block, params, opts);
    double logq = std::log(static_cast<double>(field.q()));
    auto lg = [&](u64 v) { return v == 0 ? 0.0 : std::log(static_cast<double>(v)) / logq; };
    r.delta_total = lg(r.fibers.total);
    r.delta_min_route = lg(r.fibers.min_fiber) + lg(r.fibers.image_count);
    r.delta_max_route = lg(r.fibers.max_fiber) + lg(r.fibers.image_count);
    u128 lo = u128(r.fibers.min_fiber) * r.fibers.image_count;
    u128 hi = u128(r.fibers.max_fiber) * r.fibers.image_count;
    r.sandwich_ok = lo <= r.fibers.total && r.fibers.total <= hi;
    if (!r.sandwich_ok)
        fail_internal("SandwichViolated", "min*image <= total <= max*image failed exactly");
    return r;
}

}  // namespace froblab
