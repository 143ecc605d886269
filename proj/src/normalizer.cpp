#include "stcsp/normalizer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <unordered_map>

#include "stcsp/parser.hpp"

namespace stcsp {

// ---- value ranges ---------------------------------------------------------

namespace {

Value sat_add(Value a, Value b) {
    Value r;
    if (__builtin_add_overflow(a, b, &r)) return (b > 0) ? INT64_MAX : INT64_MIN;
    return r;
}

Value sat_mul(Value a, Value b) {
    Value r;
    if (__builtin_mul_overflow(a, b, &r)) return ((a < 0) != (b < 0)) ? INT64_MIN : INT64_MAX;
    return r;
}

Value sat_neg(Value a) { return a == INT64_MIN ? INT64_MAX : -a; }

Alphabet hull(const Alphabet& a, const Alphabet& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Alphabet from_candidates(std::initializer_list<Value> vs) {
    return {std::min(vs), std::max(vs)};
}

// truncated division over a divisor interval that excludes zero
Alphabet div_range(const Alphabet& a, Value blo, Value bhi) {
    auto q = [](Value x, Value y) { return (x == INT64_MIN && y == -1) ? INT64_MAX : x / y; };
    return from_candidates({q(a.lo, blo), q(a.lo, bhi), q(a.hi, blo), q(a.hi, bhi)});
}

}  // namespace

Alphabet value_range(const Expr& e, const StCsp& vars) {
    switch (e.op()) {
    case Op::Const: return {e.value(), e.value()};
    case Op::Var: return vars.var(e.var_id()).alphabet;
    case Op::First:
    case Op::Next:
    case Op::At:
        return value_range(e.child(0), vars);
    case Op::Fby:
        return hull(value_range(e.child(0), vars), value_range(e.child(1), vars));
    case Op::Ite:
        return hull(value_range(e.child(1), vars), value_range(e.child(2), vars));
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ge: case Op::Gt: case Op::Ne:
    case Op::And: case Op::Or: case Op::Not:
        return {0, 1};
    case Op::Neg: {
        Alphabet a = value_range(e.child(0), vars);
        return {sat_neg(a.hi), sat_neg(a.lo)};
    }
    case Op::Abs: {
        Alphabet a = value_range(e.child(0), vars);
        if (a.lo >= 0) return a;
        if (a.hi <= 0) return {sat_neg(a.hi), sat_neg(a.lo)};
        return {0, std::max(sat_neg(a.lo), a.hi)};
    }
    case Op::Add: {
        Alphabet a = value_range(e.child(0), vars), b = value_range(e.child(1), vars);
        return {sat_add(a.lo, b.lo), sat_add(a.hi, b.hi)};
    }
    case Op::Sub: {
        Alphabet a = value_range(e.child(0), vars), b = value_range(e.child(1), vars);
        return {sat_add(a.lo, sat_neg(b.hi)), sat_add(a.hi, sat_neg(b.lo))};
    }
    case Op::Mul: {
        Alphabet a = value_range(e.child(0), vars), b = value_range(e.child(1), vars);
        return from_candidates({sat_mul(a.lo, b.lo), sat_mul(a.lo, b.hi), sat_mul(a.hi, b.lo), sat_mul(a.hi, b.hi)});
    }
    case Op::Div: {
        Alphabet a = value_range(e.child(0), vars), b = value_range(e.child(1), vars);
        std::optional<Alphabet> r;
        if (b.lo <= -1) r = div_range(a, b.lo, std::min<Value>(b.hi, -1));
        if (b.hi >= 1) {
            Alphabet pos = div_range(a, std::max<Value>(b.lo, 1), b.hi);
            r = r ? hull(*r, pos) : pos;
        }
        return r.value_or(Alphabet{0, 0});  // divisor always zero: every evaluation errors
    }
    case Op::Mod: {
        Alphabet a = value_range(e.child(0), vars), b = value_range(e.child(1), vars);
        Value m = std::max(sat_neg(b.lo), b.hi);  // largest |divisor|
        if (m <= 0) return {0, 0};
        Value bound = m - 1;
        Value lo = a.lo >= 0 ? 0 : -std::min(sat_neg(a.lo), bound);
        Value hi = a.hi <= 0 ? 0 : std::min(a.hi, bound);
        return {lo, hi};
    }
    }
    return {0, 0};
}

// ---- rewriting ------------------------------------------------------------

namespace {

using Path = std::vector<std::uint8_t>;  // side (0 lhs, 1 rhs), then child indices

struct Redex {
    std::size_t constraint;
    Path path;  // empty path = the until constraint itself
};

const Expr& at_path(const Constraint& c, const Path& p) {
    const Expr* e = p[0] == 0 ? &c.lhs : &c.rhs;
    for (std::size_t i = 1; i < p.size(); ++i) e = &e->child(p[i]);
    return *e;
}

Expr replace_in(const Expr& e, const Path& p, std::size_t depth, const Expr& with) {
    if (depth == p.size()) return with;
    std::uint8_t k = p[depth];
    Expr kid = replace_in(e.child(k), p, depth + 1, with);
    switch (e.arity()) {
    case 1:
        return e.op() == Op::At ? Expr::at(kid, e.value()) : Expr::unary(e.op(), kid);
    case 2:
        return Expr::binary(e.op(), k == 0 ? kid : e.child(0), k == 1 ? kid : e.child(1));
    default:
        return Expr::ite(k == 0 ? kid : e.child(0), k == 1 ? kid : e.child(1), k == 2 ? kid : e.child(2));
    }
}

Constraint replace_in(const Constraint& c, const Path& p, const Expr& with) {
    Constraint out = c;
    if (p[0] == 0) out.lhs = replace_in(c.lhs, p, 1, with);
    else out.rhs = replace_in(c.rhs, p, 1, with);
    return out;
}

// post-order: children before parents, left before right
void collect_redexes(const Expr& e, Path& path, std::size_t ci, std::vector<Redex>& out) {
    for (std::size_t i = 0; i < e.arity(); ++i) {
        path.push_back(static_cast<std::uint8_t>(i));
        collect_redexes(e.child(i), path, ci, out);
        path.pop_back();
    }
    if (is_temporal(e.op())) out.push_back({ci, path});
}

void collect_redexes(const Constraint& c, std::size_t ci, std::vector<Redex>& out) {
    Path path{0};
    collect_redexes(c.lhs, path, ci, out);
    path = {1};
    collect_redexes(c.rhs, path, ci, out);
    if (c.kind == ConstraintKind::Until) out.push_back({ci, {}});
}

class Rewriter {
public:
    Rewriter(const StCsp& p, RewriteStrategy strategy) : strategy_(strategy), rng_(strategy.seed) {
        vars_ = p;
        vars_.constraints().clear();
        pending_ = p.constraints();
    }

    NormalizeResult run() {
        for (;;) {
            std::optional<Redex> r = pick();
            if (!r) break;
            apply(*r);
        }
        NormalizeResult out;
        out.normal.vars = std::move(vars_);
        out.normal.next_pairs = std::move(next_pairs_);
        out.normal.until_pairs = std::move(until_pairs_);
        out.normal.at_triples = std::move(at_triples_);
        out.normal.pointwise = std::move(pending_);
        out.normal.pointwise.insert(out.normal.pointwise.end(), first_pairs_.begin(), first_pairs_.end());
        out.trace = std::move(trace_);
        return out;
    }

private:
    std::optional<Redex> pick() {
        if (strategy_.kind == RewriteStrategy::Kind::InnermostLeftmost) {
            for (std::size_t i = 0; i < pending_.size(); ++i) {
                std::vector<Redex> rs;
                collect_redexes(pending_[i], i, rs);
                if (!rs.empty()) return rs.front();
            }
            return std::nullopt;
        }
        std::vector<Redex> rs;
        for (std::size_t i = 0; i < pending_.size(); ++i) collect_redexes(pending_[i], i, rs);
        if (rs.empty()) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
        return rs[pick(rng_)];
    }

    VarId fresh(const Alphabet& a, RewriteStep& step) {
        VarId v = vars_.add_aux_var(a);
        step.fresh.push_back(v);
        return v;
    }

    static Constraint eq(VarId v, Expr e) { return Constraint::relation(Expr::var(v), Op::Eq, std::move(e)); }

    void apply(const Redex& r) {
        const Constraint consumed = pending_[r.constraint];
        RewriteStep step;
        step.consumed = consumed;

        if (r.path.empty()) {
            step.rule = "until";
            VarId x1 = fresh(value_range(consumed.lhs, vars_), step);
            VarId x2 = fresh(value_range(consumed.rhs, vars_), step);
            step.produced = {eq(x1, consumed.lhs), eq(x2, consumed.rhs)};
            until_pairs_.push_back({x1, x2});
            step.normalized = {Constraint::until(Expr::var(x1), Expr::var(x2))};
            pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(r.constraint));
            pending_.insert(pending_.end(), step.produced.begin(), step.produced.end());
            trace_.push_back(std::move(step));
            return;
        }

        const Expr& target = at_path(consumed, r.path);
        std::optional<VarId> replacement;
        switch (target.op()) {
        case Op::Next: {
            const Expr& operand = target.child(0);
            bool user_var = operand.is_var() && vars_.var(operand.var_id()).origin == VarOrigin::User;
            if (user_var) {
                auto it = shared_next_.find(operand.var_id().index);
                if (it != shared_next_.end()) {
                    step.rule = "next-shared";
                    replacement = it->second;
                    break;
                }
            }
            step.rule = "next";
            Alphabet range = value_range(operand, vars_);
            VarId x1 = fresh(range, step);
            VarId x2 = fresh(range, step);
            step.produced = {eq(x2, operand)};
            next_pairs_.push_back({x1, x2});
            step.normalized = {eq(x1, Expr::unary(Op::Next, Expr::var(x2)))};
            if (user_var) shared_next_[operand.var_id().index] = x1;
            replacement = x1;
            break;
        }
        case Op::Fby: {
            step.rule = "fby";
            Alphabet head = value_range(target.child(0), vars_);
            Alphabet tail = value_range(target.child(1), vars_);
            VarId x1 = fresh(hull(head, tail), step);
            VarId x2 = fresh(head, step);
            VarId x3 = fresh(tail, step);
            step.produced = {eq(x2, target.child(0)), eq(x3, target.child(1))};
            Constraint firsts = Constraint::relation(Expr::unary(Op::First, Expr::var(x1)), Op::Eq,
                                                     Expr::unary(Op::First, Expr::var(x2)));
            first_pairs_.push_back(firsts);
            next_pairs_.push_back({x3, x1});
            step.normalized = {firsts, eq(x3, Expr::unary(Op::Next, Expr::var(x1)))};
            replacement = x1;
            break;
        }
        case Op::At: {
            step.rule = "at";
            Alphabet range = value_range(target.child(0), vars_);
            VarId x1 = fresh(range, step);
            VarId x2 = fresh(range, step);
            step.produced = {eq(x2, target.child(0))};
            at_triples_.push_back({x1, x2, target.value()});
            step.normalized = {eq(x1, Expr::at(Expr::var(x2), target.value()))};
            replacement = x1;
            break;
        }
        default:
            return;
        }

        Constraint rewritten = replace_in(consumed, r.path, Expr::var(*replacement));
        pending_[r.constraint] = rewritten;
        step.produced.insert(step.produced.begin(), rewritten);
        pending_.insert(pending_.end(), step.produced.begin() + 1, step.produced.end());
        trace_.push_back(std::move(step));
    }

    RewriteStrategy strategy_;
    std::mt19937_64 rng_;
    StCsp vars_;
    std::vector<Constraint> pending_;
    std::vector<Constraint> first_pairs_;
    std::vector<NextPair> next_pairs_;
    std::vector<UntilPair> until_pairs_;
    std::vector<AtTriple> at_triples_;
    std::unordered_map<std::uint32_t, VarId> shared_next_;
    RewriteTrace trace_;
};

}  // namespace

NormalizeResult normalize(const StCsp& p, RewriteStrategy strategy) {
    return Rewriter(p, strategy).run();
}

std::size_t count_temporal_keywords(const std::vector<Constraint>& cs) {
    std::size_t n = 0;
    for (const auto& c : cs) {
        n += count_temporal(c.lhs) + count_temporal(c.rhs);
        if (c.kind == ConstraintKind::Until) ++n;
    }
    return n;
}

StCsp NormalForm::to_stcsp() const {
    StCsp out = vars;
    out.constraints().clear();
    for (const auto& c : pointwise) out.add_constraint(c);
    for (const auto& n : next_pairs)
        out.add_constraint(Constraint::relation(Expr::var(n.lhs), Op::Eq, Expr::unary(Op::Next, Expr::var(n.rhs))));
    for (const auto& u : until_pairs) out.add_constraint(Constraint::until(Expr::var(u.lhs), Expr::var(u.rhs)));
    for (const auto& a : at_triples)
        out.add_constraint(Constraint::relation(Expr::var(a.lhs), Op::Eq, Expr::at(Expr::var(a.rhs), a.time)));
    return out;
}

// ---- alpha equivalence ----------------------------------------------------

namespace {

struct Item {
    std::string pattern;            // aux occurrences printed as '?'
    std::vector<std::uint32_t> aux;  // aux var indices in print order
};

std::vector<Item> items_of(const NormalForm& nf) {
    std::vector<Item> items;
    const StCsp& vars = nf.vars;
    auto is_aux = [&](VarId v) { return vars.var(v).origin == VarOrigin::Auxiliary; };
    auto emit_var = [&](VarId v, Item& it) {
        if (is_aux(v)) {
            it.aux.push_back(v.index);
            it.pattern += "?";
        } else {
            it.pattern += "$" + std::to_string(v.index);
        }
    };
    for (const auto& c : nf.pointwise) {
        Item it;
        std::vector<std::uint32_t>* occ = &it.aux;
        VarNamer namer = [&](VarId v) -> std::string {
            if (is_aux(v)) {
                occ->push_back(v.index);
                return "?";
            }
            return "$" + std::to_string(v.index);
        };
        it.pattern = "P " + unparse(c, namer);
        items.push_back(std::move(it));
    }
    for (const auto& n : nf.next_pairs) {
        Item it{"N ", {}};
        emit_var(n.lhs, it);
        it.pattern += " ";
        emit_var(n.rhs, it);
        items.push_back(std::move(it));
    }
    for (const auto& u : nf.until_pairs) {
        Item it{"U ", {}};
        emit_var(u.lhs, it);
        it.pattern += " ";
        emit_var(u.rhs, it);
        items.push_back(std::move(it));
    }
    for (const auto& a : nf.at_triples) {
        Item it{"A" + std::to_string(a.time) + " ", {}};
        emit_var(a.lhs, it);
        it.pattern += " ";
        emit_var(a.rhs, it);
        items.push_back(std::move(it));
    }
    return items;
}

class Matcher {
public:
    Matcher(const NormalForm& a, const NormalForm& b)
        : a_(a), b_(b), ia_(items_of(a)), ib_(items_of(b)),
          fwd_(a.vars.var_count(), kUnmapped), bwd_(b.vars.var_count(), kUnmapped),
          used_(ib_.size(), false), done_(ia_.size(), false) {}

    bool run() {
        if (ia_.size() != ib_.size()) return false;
        std::map<std::string, int> count;
        for (const auto& i : ia_) ++count[i.pattern];
        for (const auto& i : ib_) --count[i.pattern];
        for (const auto& [p, n] : count) {
            if (n != 0) return false;
        }
        return search(ia_.size());
    }

private:
    static constexpr std::uint32_t kUnmapped = UINT32_MAX;

    bool compatible(const Item& x, const Item& y) const {
        if (x.pattern != y.pattern) return false;
        for (std::size_t k = 0; k < x.aux.size(); ++k) {
            std::uint32_t u = x.aux[k], v = y.aux[k];
            if (fwd_[u] != kUnmapped && fwd_[u] != v) return false;
            if (bwd_[v] != kUnmapped && bwd_[v] != u) return false;
            if (!(a_.vars.var(VarId{u}).alphabet == b_.vars.var(VarId{v}).alphabet)) return false;
        }
        // repeated occurrences inside one item must map consistently
        for (std::size_t k = 0; k < x.aux.size(); ++k) {
            for (std::size_t l = k + 1; l < x.aux.size(); ++l) {
                if ((x.aux[k] == x.aux[l]) != (y.aux[k] == y.aux[l])) return false;
            }
        }
        return true;
    }

    bool search(std::size_t remaining) {
        if (remaining == 0) return true;
        // most constrained item first
        std::size_t best = SIZE_MAX;
        std::vector<std::size_t> best_cands;
        for (std::size_t i = 0; i < ia_.size(); ++i) {
            if (done_[i]) continue;
            std::vector<std::size_t> cands;
            for (std::size_t j = 0; j < ib_.size(); ++j) {
                if (!used_[j] && compatible(ia_[i], ib_[j])) cands.push_back(j);
            }
            if (best == SIZE_MAX || cands.size() < best_cands.size()) {
                best = i;
                best_cands = std::move(cands);
                if (best_cands.size() <= 1) break;
            }
        }
        if (best_cands.empty()) return false;
        done_[best] = true;
        for (std::size_t j : best_cands) {
            std::vector<std::uint32_t> newly;
            const Item& x = ia_[best];
            const Item& y = ib_[j];
            for (std::size_t k = 0; k < x.aux.size(); ++k) {
                if (fwd_[x.aux[k]] == kUnmapped) {
                    fwd_[x.aux[k]] = y.aux[k];
                    bwd_[y.aux[k]] = x.aux[k];
                    newly.push_back(x.aux[k]);
                }
            }
            used_[j] = true;
            if (search(remaining - 1)) return true;
            used_[j] = false;
            for (std::uint32_t u : newly) {
                bwd_[fwd_[u]] = kUnmapped;
                fwd_[u] = kUnmapped;
            }
        }
        done_[best] = false;
        return false;
    }

    const NormalForm& a_;
    const NormalForm& b_;
    std::vector<Item> ia_, ib_;
    std::vector<std::uint32_t> fwd_, bwd_;
    std::vector<bool> used_, done_;
};

}  // namespace

bool alpha_equivalent(const NormalForm& a, const NormalForm& b) {
    if (a.vars.var_count() != b.vars.var_count()) return false;
    for (std::size_t i = 0; i < a.vars.var_count(); ++i) {
        const VarInfo& x = a.vars.vars()[i];
        const VarInfo& y = b.vars.vars()[i];
        if (x.origin != y.origin) return false;
        if (x.origin == VarOrigin::User && !(x == y)) return false;
    }
    return Matcher(a, b).run();
}

}  // namespace stcsp
