#pragma once

// Coarse-dimension estimation along schedules of growing fields, the
// theta-dichotomy test, and the fiber subadditivity check.

#include <vector>

#include "froblab/engine.hpp"

namespace froblab {

struct DimensionEstimate {
    u64 p = 0;
    int m = 1;
    int n_free = 0;
    struct PerK {
        int k;
        u64 count;
        double delta;  // log(count) / (k log p), 0 when count == 0
    };
    std::vector<PerK> per_k;
    bool divergent = false;
    int fitted_dim = 0;     // meaningful only when !divergent
    double residual = 0.0;  // |delta(k_max) - fitted_dim|
    double tolerance = 0.1;
    double elapsed_ms = 0.0;
};

// Runs count at each k of the schedule (fixed p and m) and fits an integer
// dimension to delta(k_max). Divergent when the residual misses the tolerance
// or the residuals fail to shrink monotonically along the schedule.
DimensionEstimate estimate_dimension(u64 p, const std::vector<int>& schedule, int m, const FormulaPtr& formula,
                                     const ParamEnv& params, double tolerance = 0.1,
                                     const EngineOptions& opts = {});

struct ThetaReport {
    bool theta_holds = false;
    u64 card = 0;  // |psi(F)|
    u64 q = 0;
    double elapsed_ms = 0.0;
};

// theta_psi: every z in F is (x1-x2)(x3-x4)^{-1} with all xi in psi(F) and
// x3 != x4. Asserts the exact dichotomy: theta -> card^4 >= q, and
// !theta -> card^2 <= q.
ThetaReport theta_test(const Field& field, const FormulaPtr& psi, const ParamEnv& params,
                       const EngineOptions& opts = {});

struct SubadditivityReport {
    FiberReport fibers;
    double delta_total = 0.0;      // log(total)/log q
    double delta_min_route = 0.0;  // (log min_fiber + log image)/log q
    double delta_max_route = 0.0;  // (log max_fiber + log image)/log q
    bool sandwich_ok = false;      // min*image <= total <= max*image, exact
};

SubadditivityReport check_subadditivity(const Field& field, const FormulaPtr& formula,
                                        const std::vector<std::string>& x_block,
                                        const std::vector<std::string>& y_block, const ParamEnv& params,
                                        const EngineOptions& opts = {});

}  // namespace froblab
