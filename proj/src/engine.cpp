#include "froblab/engine.hpp"

#include <chrono>
#include <cmath>

#include "froblab/detail/parallel.hpp"

namespace froblab {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---- compilation ----

Evaluator::Evaluator(const Field& field, const FormulaPtr& formula, const std::map<std::string, Elem>& fixed)
    : field_(&field), fixed_(fixed) {
    for (const auto& [name, e] : fixed_) {
        if (e.fld == nullptr || !field.same_field(*e.fld))
            fail_pre("MixedContext", "binding for '" + name + "' belongs to a different field");
    }
    for (const auto& v : free_vars(formula)) {
        if (!fixed_.count(v)) {
            free_slots_[v] = static_cast<int>(free_names_.size());
            free_names_.push_back(v);
        }
    }
    n_slots_ = static_cast<int>(free_names_.size());
    std::vector<std::pair<std::string, int>> scope;
    root_ = compile_f(formula, scope);
}

int Evaluator::slot_of(const std::string& v) const {
    auto it = free_slots_.find(v);
    return it == free_slots_.end() ? -1 : it->second;
}

int Evaluator::compile_t(const TermPtr& t, std::vector<std::pair<std::string, int>>& scope) {
    TNode n;
    n.kind = t->kind;
    switch (t->kind) {
        case Term::Kind::var: {
            int slot = -1;
            for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
                if (it->first == t->name) { slot = it->second; break; }
            }
            if (slot < 0) {
                auto fx = fixed_.find(t->name);
                if (fx != fixed_.end()) {
                    n.kind = Term::Kind::int_lit;  // resolved constant
                    n.imm = fx->second.idx;
                    break;
                }
                auto fs = free_slots_.find(t->name);
                if (fs == free_slots_.end()) fail_pre("MissingBinding", "no binding for variable '" + t->name + "'");
                slot = fs->second;
            }
            n.imm = static_cast<u64>(slot);
            break;
        }
        case Term::Kind::int_lit:
            n.imm = field_->from_int(t->value).idx;
            break;
        case Term::Kind::param: {
            auto fx = fixed_.find(t->name);
            if (fx == fixed_.end()) fail_pre("MissingBinding", "no binding for parameter '" + t->name + "'");
            n.kind = Term::Kind::int_lit;
            n.imm = fx->second.idx;
            break;
        }
        case Term::Kind::add:
        case Term::Kind::sub:
        case Term::Kind::mul:
            n.a = compile_t(t->a, scope);
            n.b = compile_t(t->b, scope);
            break;
        case Term::Kind::neg:
            n.a = compile_t(t->a, scope);
            break;
        case Term::Kind::sigma:
            n.a = compile_t(t->a, scope);
            n.imm = field_->frob_exponent(static_cast<u64>(t->value));
            break;
        case Term::Kind::frob_pow:
            n.a = compile_t(t->a, scope);
            n.imm = field_->reduced_p_power(static_cast<u64>(t->value));
            break;
    }
    terms_.push_back(n);
    return static_cast<int>(terms_.size()) - 1;
}

int Evaluator::compile_f(const FormulaPtr& f, std::vector<std::pair<std::string, int>>& scope) {
    FNode n;
    n.kind = f->kind;
    switch (f->kind) {
        case Formula::Kind::eq:
            n.t1 = compile_t(f->t1, scope);
            n.t2 = compile_t(f->t2, scope);
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            n.slot = n_slots_++;
            scope.emplace_back(f->var, n.slot);
            n.f1 = compile_f(f->f1, scope);
            scope.pop_back();
            break;
        case Formula::Kind::neg:
            n.f1 = compile_f(f->f1, scope);
            break;
        default:
            n.f1 = compile_f(f->f1, scope);
            n.f2 = compile_f(f->f2, scope);
    }
    forms_.push_back(n);
    return static_cast<int>(forms_.size()) - 1;
}

// ---- evaluation ----

u64 Evaluator::eval_t(int idx, const std::vector<u64>& slots) const {
    const TNode& n = terms_[static_cast<size_t>(idx)];
    switch (n.kind) {
        case Term::Kind::var: return slots[n.imm];
        case Term::Kind::int_lit:
        case Term::Kind::param: return n.imm;
        case Term::Kind::add: return field_->add_idx(eval_t(n.a, slots), eval_t(n.b, slots));
        case Term::Kind::sub: return field_->sub_idx(eval_t(n.a, slots), eval_t(n.b, slots));
        case Term::Kind::mul: return field_->mul_idx(eval_t(n.a, slots), eval_t(n.b, slots));
        case Term::Kind::neg: return field_->neg_idx(eval_t(n.a, slots));
        case Term::Kind::sigma:
        case Term::Kind::frob_pow: return field_->pow_reduced_idx(eval_t(n.a, slots), n.imm);
    }
    return 0;
}

bool Evaluator::eval_f(int idx, std::vector<u64>& slots, BudgetGauge& gauge) const {
    const FNode& n = forms_[static_cast<size_t>(idx)];
    switch (n.kind) {
        case Formula::Kind::eq:
            gauge.tick();
            return eval_t(n.t1, slots) == eval_t(n.t2, slots);
        case Formula::Kind::conj: return eval_f(n.f1, slots, gauge) && eval_f(n.f2, slots, gauge);
        case Formula::Kind::disj: return eval_f(n.f1, slots, gauge) || eval_f(n.f2, slots, gauge);
        case Formula::Kind::neg: return !eval_f(n.f1, slots, gauge);
        case Formula::Kind::implies: return !eval_f(n.f1, slots, gauge) || eval_f(n.f2, slots, gauge);
        case Formula::Kind::exists: {
            u64 q = field_->q();
            for (u64 v = 0; v < q; ++v) {
                slots[static_cast<size_t>(n.slot)] = v;
                if (eval_f(n.f1, slots, gauge)) return true;
            }
            return false;
        }
        case Formula::Kind::forall: {
            u64 q = field_->q();
            for (u64 v = 0; v < q; ++v) {
                slots[static_cast<size_t>(n.slot)] = v;
                if (!eval_f(n.f1, slots, gauge)) return false;
            }
            return true;
        }
    }
    return false;
}

// ---- public operations ----

bool evaluate(const Field& field, const FormulaPtr& formula, const std::map<std::string, Elem>& env,
              const EngineOptions& opts) {
    Evaluator ev(field, formula, env);
    if (ev.n_free() != 0)
        fail_pre("MissingBinding", "no binding for variable '" + ev.free_names().front() + "'");
    Budget budget(opts.budget);
    BudgetGauge gauge{&budget, 0};
    std::vector<u64> slots(static_cast<size_t>(ev.n_slots()), 0);
    bool r = ev.eval(slots, gauge);
    gauge.flush();
    return r;
}

namespace {

std::map<std::string, Elem> resolve_params(const Field& field, const ParamEnv& params) {
    std::map<std::string, Elem> out;
    for (const auto& [name, spec] : params) out.emplace(name, spec.resolve(field));
    return out;
}

FormulaPtr prepare(const FormulaPtr& formula, const ParamEnv& params) {
    std::set<std::string> names;
    for (const auto& [name, spec] : params) names.insert(name);
    FormulaPtr marked = mark_params(formula, names);
    validate(marked, params);
    return marked;
}

// Counts satisfying assignments of the free slots [first, n) with slots below
// `first` already set.
u64 count_tail(const Evaluator& ev, std::vector<u64>& slots, int first, BudgetGauge& gauge) {
    int n = ev.n_free();
    u64 q = ev.field().q();
    if (first == n) return ev.eval(slots, gauge) ? 1 : 0;
    if (first == n - 1) {
        u64 c = 0;
        for (u64 v = 0; v < q; ++v) {
            slots[static_cast<size_t>(first)] = v;
            if (ev.eval(slots, gauge)) ++c;
        }
        return c;
    }
    u64 c = 0;
    for (u64 v = 0; v < q; ++v) {
        slots[static_cast<size_t>(first)] = v;
        c += count_tail(ev, slots, first + 1, gauge);
    }
    return c;
}

void precheck_budget(u64 q, int n_vars, u64 budget) {
    u128 total = 1;
    for (int i = 0; i < n_vars; ++i) {
        total *= q;
        if (total > budget)
            fail_budget("q^" + std::to_string(n_vars) + " assignments exceed the budget of " +
                        std::to_string(budget) + "; covered 0 of them");
    }
}

}  // namespace

CountReport count(const Field& field, const FormulaPtr& formula, const ParamEnv& params,
                  const EngineOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Evaluator ev(field, prepare(formula, params), resolve_params(field, params));
    int n = ev.n_free();
    precheck_budget(field.q(), n, opts.budget);
    Budget budget(opts.budget);

    u64 total_count = 0;
    if (n == 0) {
        BudgetGauge gauge{&budget, 0};
        std::vector<u64> slots(static_cast<size_t>(ev.n_slots()), 0);
        total_count = ev.eval(slots, gauge) ? 1 : 0;
        gauge.flush();
    } else {
        struct Acc {
            u64 count = 0;
        };
        auto accs = detail::parallel_blocks<Acc>(
            field.q(), opts.workers, Acc{}, [&](u64 b, u64 e, Acc& acc) {
                BudgetGauge gauge{&budget, 0};
                std::vector<u64> slots(static_cast<size_t>(ev.n_slots()), 0);
                for (u64 v = b; v < e; ++v) {
                    slots[0] = v;
                    acc.count += count_tail(ev, slots, 1, gauge);
                }
                gauge.flush();
            });
        for (const auto& a : accs) total_count += a.count;
    }

    CountReport r;
    r.count = total_count;
    r.q = field.q();
    r.n_free = n;
    r.normalized = total_count == 0 ? 0.0 : std::log(static_cast<double>(total_count)) / std::log(static_cast<double>(field.q()));
    r.elapsed_ms = ms_since(t0);
    r.p = field.p();
    r.k = field.k();
    r.m = field.frob_power();
    return r;
}

FiberReport fiber_counts(const Field& field, const FormulaPtr& formula, const std::vector<std::string>& x_block,
                         const std::vector<std::string>& y_block, const ParamEnv& params,
                         const EngineOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Evaluator ev(field, prepare(formula, params), resolve_params(field, params));

    std::set<std::string> seen;
    for (const auto& v : x_block)
        if (!seen.insert(v).second) fail_pre("InvalidBlocks", "variable '" + v + "' listed twice");
    for (const auto& v : y_block)
        if (!seen.insert(v).second) fail_pre("InvalidBlocks", "variable '" + v + "' in both blocks");
    for (const auto& v : ev.free_names())
        if (!seen.count(v)) fail_pre("InvalidBlocks", "free variable '" + v + "' not covered by the blocks");
    if (seen.size() != ev.free_names().size())
        fail_pre("InvalidBlocks", "blocks name variables that are not free in the formula");

    std::vector<int> x_slots, y_slots;
    for (const auto& v : x_block) x_slots.push_back(ev.slot_of(v));
    for (const auto& v : y_block) y_slots.push_back(ev.slot_of(v));

    u64 q = field.q();
    precheck_budget(q, ev.n_free(), opts.budget);
    Budget budget(opts.budget);

    u128 y_total = 1;
    for (size_t i = 0; i < y_slots.size(); ++i) y_total *= q;

    struct Acc {
        u64 min_fiber = ~u64(0);
        u64 max_fiber = 0;
        u64 image = 0;
        u64 total = 0;
    };
    auto accs = detail::parallel_blocks<Acc>(
        static_cast<u64>(y_total), opts.workers, Acc{}, [&](u64 b, u64 e, Acc& acc) {
            BudgetGauge gauge{&budget, 0};
            std::vector<u64> slots(static_cast<size_t>(ev.n_slots()), 0);
            for (u64 yi = b; yi < e; ++yi) {
                u64 rem = yi;  // decode y assignment, last slot fastest
                for (size_t j = y_slots.size(); j-- > 0;) {
                    slots[static_cast<size_t>(y_slots[j])] = rem % q;
                    rem /= q;
                }
                u64 fiber = 0;
                // enumerate the x block lexicographically
                std::vector<u64> xv(x_slots.size(), 0);
                while (true) {
                    if (ev.eval(slots, gauge)) ++fiber;
                    size_t j = x_slots.size();
                    while (j-- > 0) {
                        size_t sj = static_cast<size_t>(x_slots[j]);
                        if (++slots[sj] < q) break;
                        slots[sj] = 0;
                        if (j == 0) goto x_done;
                    }
                    if (x_slots.empty()) break;
                }
            x_done:
                if (fiber > 0) {
                    acc.total += fiber;
                    ++acc.image;
                    if (fiber < acc.min_fiber) acc.min_fiber = fiber;
                    if (fiber > acc.max_fiber) acc.max_fiber = fiber;
                }
            }
            gauge.flush();
        });

    FiberReport r;
    r.q = q;
    r.min_fiber = ~u64(0);
    for (const auto& a : accs) {
        r.total += a.total;
        r.image_count += a.image;
        if (a.image > 0) {
            if (a.min_fiber < r.min_fiber) r.min_fiber = a.min_fiber;
            if (a.max_fiber > r.max_fiber) r.max_fiber = a.max_fiber;
        }
    }
    if (r.image_count == 0) r.min_fiber = 0;
    r.elapsed_ms = ms_since(t0);
    return r;
}

std::vector<u64> satisfying_set(const Field& field, const FormulaPtr& formula, const ParamEnv& params,
                                const EngineOptions& opts) {
    Evaluator ev(field, prepare(formula, params), resolve_params(field, params));
    if (ev.n_free() != 1)
        fail_pre("InvalidBlocks", "expected exactly one free variable, got " + std::to_string(ev.n_free()));
    Budget budget(opts.budget);
    BudgetGauge gauge{&budget, 0};
    std::vector<u64> slots(static_cast<size_t>(ev.n_slots()), 0);
    std::vector<u64> out;
    for (u64 v = 0; v < field.q(); ++v) {
        slots[0] = v;
        if (ev.eval(slots, gauge)) out.push_back(v);
    }
    gauge.flush();
    return out;
}

}  // namespace froblab
