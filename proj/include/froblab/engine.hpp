#pragma once

// Exact Tarskian evaluation and solution counting over GF(p^k)^n.
// Quantifiers expand exhaustively with short-circuiting; counts enumerate
// free-variable assignments in canonical index order. Parallel runs split
// the outermost range into contiguous blocks and reduce commutatively, so
// every report is identical regardless of worker count.

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "froblab/field.hpp"
#include "froblab/formula.hpp"

namespace froblab {

struct EngineOptions {
    int workers = 0;                      // 0 = hardware concurrency
    u64 budget = 10'000'000'000ull;       // max innermost (atomic) evaluations
};

struct CountReport {
    u64 count = 0;
    u64 q = 0;
    int n_free = 0;
    double normalized = 0.0;  // log(count)/log(q); 0 when count == 0 (empty)
    double elapsed_ms = 0.0;
    u64 p = 0;
    int k = 0;
    int m = 0;
};

struct FiberReport {
    u64 min_fiber = 0;    // minimal nonempty fiber size
    u64 max_fiber = 0;
    u64 image_count = 0;  // number of y with nonempty fiber
    u64 total = 0;        // |phi| over both blocks
    u64 q = 0;
    double elapsed_ms = 0.0;
};

// Shared atomic budget; workers flush batched tallies through BudgetGauge.
class Budget {
public:
    explicit Budget(u64 limit) : limit_(limit) {}
    void add(u64 n) {
        u64 used = used_.fetch_add(n, std::memory_order_relaxed) + n;
        if (used > limit_)
            fail_budget("evaluation budget of " + std::to_string(limit_) + " innermost evaluations exceeded");
    }
    u64 used() const { return used_.load(std::memory_order_relaxed); }

private:
    std::atomic<u64> used_{0};
    u64 limit_;
};

struct BudgetGauge {
    Budget* shared = nullptr;
    u64 local = 0;
    void tick() {
        if (++local >= 4096) flush();
    }
    void flush() {
        if (shared && local) {
            u64 n = local;
            local = 0;
            shared->add(n);
        }
    }
};

// A formula compiled against one field: variables resolved to slots, params
// and bound names resolved to constants, Frobenius powers pre-reduced.
class Evaluator {
public:
    // Fixed bindings give values for param nodes and for any free variable
    // of the same name; the remaining free variables become input slots.
    Evaluator(const Field& field, const FormulaPtr& formula, const std::map<std::string, Elem>& fixed);

    const Field& field() const { return *field_; }
    int n_free() const { return static_cast<int>(free_names_.size()); }
    const std::vector<std::string>& free_names() const { return free_names_; }
    int n_slots() const { return n_slots_; }
    int slot_of(const std::string& free_var) const;  // -1 if not a free slot

    bool eval(std::vector<u64>& slots, BudgetGauge& gauge) const { return eval_f(root_, slots, gauge); }

private:
    struct TNode {
        Term::Kind kind;
        int a = -1, b = -1;
        u64 imm = 0;  // slot (var), element index (const), reduced exponent (sigma/frob)
    };
    struct FNode {
        Formula::Kind kind;
        int t1 = -1, t2 = -1;
        int f1 = -1, f2 = -1;
        int slot = -1;  // quantifiers
    };

    int compile_t(const TermPtr& t, std::vector<std::pair<std::string, int>>& scope);
    int compile_f(const FormulaPtr& f, std::vector<std::pair<std::string, int>>& scope);
    u64 eval_t(int idx, const std::vector<u64>& slots) const;
    bool eval_f(int idx, std::vector<u64>& slots, BudgetGauge& gauge) const;

    const Field* field_;
    std::map<std::string, Elem> fixed_;
    std::vector<std::string> free_names_;
    std::map<std::string, int> free_slots_;
    std::vector<TNode> terms_;
    std::vector<FNode> forms_;
    int root_ = -1;
    int n_slots_ = 0;
};

// Truth value of phi under env; env must cover free variables and params.
bool evaluate(const Field& field, const FormulaPtr& formula, const std::map<std::string, Elem>& env,
              const EngineOptions& opts = {});

// Exact number of satisfying free-variable assignments. Param names bound in
// `params` are rewritten to param nodes before counting.
CountReport count(const Field& field, const FormulaPtr& formula, const ParamEnv& params,
                  const EngineOptions& opts = {});

// Fiber statistics of phi(x; y): for each y-assignment with nonempty fiber
// {x : phi(x, y)}, tracks min/max fiber size, image cardinality and total.
FiberReport fiber_counts(const Field& field, const FormulaPtr& formula,
                         const std::vector<std::string>& x_block, const std::vector<std::string>& y_block,
                         const ParamEnv& params, const EngineOptions& opts = {});

// Ascending indices of the satisfying assignments of a one-free-variable
// formula (serial scan).
std::vector<u64> satisfying_set(const Field& field, const FormulaPtr& formula, const ParamEnv& params,
                                const EngineOptions& opts = {});

}  // namespace froblab
