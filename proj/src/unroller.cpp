#include "stcsp/unroller.hpp"

#include <algorithm>
#include <functional>

namespace stcsp {

namespace {

// every (variable, time) an evaluation of e at t may read, on all branches
void collect_reads(const Expr& e, TimeIndex t, std::vector<std::pair<VarId, TimeIndex>>& out) {
    switch (e.op()) {
    case Op::Const:
        return;
    case Op::Var:
        out.emplace_back(e.var_id(), t);
        return;
    case Op::First:
        collect_reads(e.child(0), 0, out);
        return;
    case Op::Next:
        collect_reads(e.child(0), t + 1, out);
        return;
    case Op::At:
        collect_reads(e.child(0), e.value(), out);
        return;
    case Op::Fby:
        if (t == 0) collect_reads(e.child(0), 0, out);
        else collect_reads(e.child(1), t - 1, out);
        return;
    default:
        for (std::size_t i = 0; i < e.arity(); ++i) collect_reads(e.child(i), t, out);
    }
}

bool mentions_at_beyond(const Expr& e, TimeIndex T) {
    if (e.op() == Op::At && e.value() >= T) return true;
    for (std::size_t i = 0; i < e.arity(); ++i) {
        if (mentions_at_beyond(e.child(i), T)) return true;
    }
    return false;
}

struct Partial {
    const FdCsp& csp;
    const std::vector<std::optional<Value>>& values;
    std::optional<Value> operator()(VarId v, TimeIndex t) const {
        if (t < 0 || t >= csp.horizon) return std::nullopt;
        return values[csp.index(v, t)];
    }
};

enum class Truth { False, True, Unknown };

Truth truth_of(const EvalResult& r) {
    if (r.is_error()) return Truth::False;
    if (!r.determined()) return Truth::Unknown;
    return r.value != 0 ? Truth::True : Truth::False;
}

Truth check(const FdConstraint& c, const Partial& lookup) {
    if (c.kind == FdConstraint::Kind::Pointwise) return truth_of(evaluate_pointwise(c.source, lookup, c.time));
    bool unknown = false;
    for (TimeIndex i : c.options) {
        Truth b = truth_of(evaluate(c.source.rhs, lookup, i));
        if (b == Truth::False) continue;
        Truth prefix = Truth::True;
        for (TimeIndex j = 0; j < i && prefix != Truth::False; ++j) {
            Truth a = truth_of(evaluate(c.source.lhs, lookup, j));
            if (a == Truth::False) prefix = Truth::False;
            else if (a == Truth::Unknown) prefix = Truth::Unknown;
        }
        if (prefix == Truth::False) continue;
        if (b == Truth::True && prefix == Truth::True) return Truth::True;
        unknown = true;
    }
    return unknown ? Truth::Unknown : Truth::False;
}

}  // namespace

FdCsp unroll(const StCsp& p, TimeIndex T) {
    if (T < 1) throw std::invalid_argument("horizon must be at least 1");
    FdCsp out;
    out.model = p;
    out.horizon = T;
    for (TimeIndex t = 0; t < T; ++t) {
        for (std::uint32_t v = 0; v < p.var_count(); ++v) out.vars.push_back({VarId{v}, t, p.vars()[v].alphabet});
    }
    auto scope_of = [&](const std::vector<std::pair<VarId, TimeIndex>>& reads) -> std::optional<std::vector<std::uint32_t>> {
        std::vector<std::uint32_t> scope;
        for (const auto& [v, t] : reads) {
            if (t < 0 || t >= T) return std::nullopt;
            scope.push_back(out.index(v, t));
        }
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
        return scope;
    };

    for (const auto& c : p.constraints()) {
        if (mentions_at_beyond(c.lhs, T) || mentions_at_beyond(c.rhs, T)) {
            out.unsat_by_construction = true;
            out.reason = "an @ reference lies at or beyond the horizon";
        }
        if (c.pointwise()) {
            for (TimeIndex t = 0; t < T; ++t) {
                std::vector<std::pair<VarId, TimeIndex>> reads;
                collect_reads(c.lhs, t, reads);
                collect_reads(c.rhs, t, reads);
                if (auto scope = scope_of(reads)) {
                    out.constraints.push_back({FdConstraint::Kind::Pointwise, c, t, {}, std::move(*scope)});
                }
            }
            continue;
        }
        FdConstraint ev{FdConstraint::Kind::Eventually, c, 0, {}, {}};
        std::vector<std::pair<VarId, TimeIndex>> reads;
        for (TimeIndex i = 0; i < T; ++i) {
            collect_reads(c.rhs, i, reads);
            if (i > 0) collect_reads(c.lhs, i - 1, reads);
            auto scope = scope_of(reads);
            if (!scope) break;  // reads only grow with i
            ev.options.push_back(i);
            ev.scope = std::move(*scope);
        }
        out.constraints.push_back(std::move(ev));
    }
    return out;
}

HorizonResult fd_solve(const FdCsp& c, FdMode mode, std::uint64_t node_budget) {
    HorizonResult result;
    result.horizon = c.horizon;
    if (c.unsat_by_construction) return result;

    const std::size_t n = c.vars.size();
    std::vector<std::vector<Value>> domain(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (Value x = c.vars[i].alphabet.lo; x <= c.vars[i].alphabet.hi; ++x) domain[i].push_back(x);
    }
    std::vector<std::vector<std::uint32_t>> watch(n);
    std::vector<std::size_t> open(c.constraints.size());
    for (std::uint32_t k = 0; k < c.constraints.size(); ++k) {
        for (std::uint32_t v : c.constraints[k].scope) watch[v].push_back(k);
        open[k] = c.constraints[k].scope.size();
    }
    std::vector<std::optional<Value>> values(n);
    Partial lookup{c, values};

    for (std::uint32_t k = 0; k < c.constraints.size(); ++k) {
        if (open[k] == 0 && check(c.constraints[k], lookup) != Truth::True) return result;
    }

    auto to_prefix = [&]() {
        StreamPrefix s;
        const std::size_t width = c.model.var_count();
        for (TimeIndex t = 0; t < c.horizon; ++t) {
            InstantaneousAssignment step;
            for (std::size_t v = 0; v < width; ++v) step.push_back(*values[static_cast<std::size_t>(t) * width + v]);
            s.steps.push_back(std::move(step));
        }
        return s;
    };

    bool stop = false;
    bool over_budget = false;
    std::function<void(std::size_t)> search = [&](std::size_t var) {
        if (var == n) {
            ++result.solution_count;
            if (!result.assignment) result.assignment = to_prefix();
            if (mode == FdMode::All) result.solutions.push_back(to_prefix());
            if (mode == FdMode::First) stop = true;
            return;
        }
        const std::vector<Value> candidates = domain[var];
        for (Value x : candidates) {
            if (stop) return;
            if (++result.nodes > node_budget) {
                over_budget = stop = true;
                return;
            }
            values[var] = x;
            std::vector<std::pair<std::uint32_t, std::vector<Value>>> trail;
            bool ok = true;
            for (std::uint32_t k : watch[var]) --open[k];
            for (std::uint32_t k : watch[var]) {
                const FdConstraint& fc = c.constraints[k];
                if (open[k] == 0) {
                    if (check(fc, lookup) != Truth::True) ok = false;
                } else if (fc.kind == FdConstraint::Kind::Eventually) {
                    if (check(fc, lookup) == Truth::False) ok = false;
                } else if (open[k] == 1) {
                    std::uint32_t last = 0;
                    for (std::uint32_t v : fc.scope) {
                        if (!values[v]) last = v;
                    }
                    std::vector<Value> kept;
                    for (Value y : domain[last]) {
                        values[last] = y;
                        if (check(fc, lookup) != Truth::False) kept.push_back(y);
                    }
                    values[last].reset();
                    if (kept.size() != domain[last].size()) {
                        trail.emplace_back(last, domain[last]);
                        domain[last] = std::move(kept);
                    }
                    if (domain[last].empty()) ok = false;
                }
                if (!ok) break;
            }
            if (ok) search(var + 1);
            for (auto it = trail.rbegin(); it != trail.rend(); ++it) domain[it->first] = std::move(it->second);
            for (std::uint32_t k : watch[var]) ++open[k];
            values[var].reset();
        }
    };
    search(0);

    if (over_budget) {
        result.outcome = HorizonResult::Outcome::BudgetExceeded;
        return result;
    }
    result.outcome = result.solution_count > 0 ? HorizonResult::Outcome::Sat : HorizonResult::Outcome::Unsat;
    return result;
}

HorizonResult increment_until_sat(const StCsp& p, TimeIndex t_max, std::uint64_t node_budget) {
    if (t_max < 1) throw std::invalid_argument("horizon cap must be at least 1");
    std::uint64_t nodes = 0;
    for (TimeIndex T = 1; T <= t_max; ++T) {
        HorizonResult r = fd_solve(unroll(p, T), FdMode::First, node_budget);
        nodes += r.nodes;
        r.nodes = nodes;
        if (r.outcome != HorizonResult::Outcome::Unsat) return r;
    }
    HorizonResult none;
    none.horizon = t_max;
    none.nodes = nodes;
    return none;
}

TimeIndex mc_horizon_cap(int n, int b) { return static_cast<TimeIndex>(n) * (b + 1); }

}  // namespace stcsp
