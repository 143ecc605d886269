#include "stcsp/eval.hpp"

#include <algorithm>

namespace stcsp {

namespace detail {

bool checked_arith(Op op, Value a, Value b, Value& out) {
    switch (op) {
    case Op::Add: return !__builtin_add_overflow(a, b, &out);
    case Op::Sub: return !__builtin_sub_overflow(a, b, &out);
    case Op::Mul: return !__builtin_mul_overflow(a, b, &out);
    case Op::Div:
        if (b == 0 || (a == INT64_MIN && b == -1)) return false;
        out = a / b;
        return true;
    case Op::Mod:
        if (b == 0 || (a == INT64_MIN && b == -1)) return false;
        out = a % b;
        return true;
    default:
        return false;
    }
}

Value apply_relation(Op op, Value a, Value b) {
    switch (op) {
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Eq: return a == b;
    case Op::Ge: return a >= b;
    case Op::Gt: return a > b;
    case Op::Ne: return a != b;
    default: return 0;
    }
}

}  // namespace detail

namespace {

struct PrefixLookup {
    const StreamPrefix& prefix;
    std::optional<Value> operator()(VarId v, TimeIndex t) const {
        if (t < 0 || static_cast<std::size_t>(t) >= prefix.steps.size()) return std::nullopt;
        return prefix.steps[static_cast<std::size_t>(t)].at(v.index);
    }
};

TimeIndex scan_limit(const Constraint& c, const StreamPrefix& prefix) {
    auto w = relative_window(c);
    TimeIndex lookback = w ? std::max<TimeIndex>(0, -w->min_offset) : 0;
    return static_cast<TimeIndex>(prefix.length()) + lookback;
}

}  // namespace

EvalResult eval_ground(const Expr& e, const StreamPrefix& prefix, TimeIndex t) {
    return evaluate(e, PrefixLookup{prefix}, t);
}

PrefixStatus check_prefix(const Constraint& c, const StreamPrefix& prefix) {
    PrefixLookup lookup{prefix};
    const TimeIndex limit = scan_limit(c, prefix);
    if (c.pointwise()) {
        for (TimeIndex t = 0; t <= limit; ++t) {
            EvalResult r = evaluate_pointwise(c, lookup, t);
            if (r.is_error() || (r.determined() && r.value == 0)) return PrefixStatus::violated(t);
        }
        return PrefixStatus::consistent();
    }
    for (TimeIndex i = 0; i <= limit; ++i) {
        EvalResult b = evaluate(c.rhs, lookup, i);
        if (b.is_error()) return PrefixStatus::violated(i);
        if (!b.determined()) return PrefixStatus::consistent();
        if (b.value != 0) return PrefixStatus::satisfied(i);
        EvalResult a = evaluate(c.lhs, lookup, i);
        if (a.is_error() || (a.determined() && a.value == 0)) return PrefixStatus::violated(i);
        if (!a.determined()) return PrefixStatus::consistent();
    }
    return PrefixStatus::consistent();
}

// ---- read-window analysis -------------------------------------------------

namespace {

std::optional<RelativeWindow> hull(std::optional<RelativeWindow> a, std::optional<RelativeWindow> b) {
    if (!a) return b;
    if (!b) return a;
    return RelativeWindow{std::min(a->min_offset, b->min_offset), std::max(a->max_offset, b->max_offset)};
}

std::optional<RelativeWindow> shift(std::optional<RelativeWindow> w, TimeIndex by) {
    if (!w) return w;
    return RelativeWindow{w->min_offset + by, w->max_offset + by};
}

}  // namespace

std::optional<RelativeWindow> relative_window(const Expr& e) {
    switch (e.op()) {
    case Op::Const:
    case Op::First:
    case Op::At:
        return std::nullopt;
    case Op::Var:
        return RelativeWindow{0, 0};
    case Op::Next:
        return shift(relative_window(e.child(0)), 1);
    case Op::Fby:
        return shift(relative_window(e.child(1)), -1);
    default: {
        std::optional<RelativeWindow> w;
        for (std::size_t i = 0; i < e.arity(); ++i) w = hull(w, relative_window(e.child(i)));
        return w;
    }
    }
}

std::optional<RelativeWindow> relative_window(const Constraint& c) {
    return hull(relative_window(c.lhs), relative_window(c.rhs));
}

TimeIndex max_read_at(const Expr& e, TimeIndex t) {
    switch (e.op()) {
    case Op::Const: return -1;
    case Op::Var: return t;
    case Op::Next: return max_read_at(e.child(0), t + 1);
    case Op::First: return max_read_at(e.child(0), 0);
    case Op::At: return max_read_at(e.child(0), e.value());
    case Op::Fby: return t == 0 ? max_read_at(e.child(0), 0) : max_read_at(e.child(1), t - 1);
    default: {
        TimeIndex m = -1;
        for (std::size_t i = 0; i < e.arity(); ++i) m = std::max(m, max_read_at(e.child(i), t));
        return m;
    }
    }
}

TimeIndex max_absolute_read(const Expr& e) {
    switch (e.op()) {
    case Op::First: return std::max(max_read_at(e.child(0), 0), max_absolute_read(e.child(0)));
    case Op::At: return std::max(max_read_at(e.child(0), e.value()), max_absolute_read(e.child(0)));
    default: {
        TimeIndex m = -1;
        for (std::size_t i = 0; i < e.arity(); ++i) m = std::max(m, max_absolute_read(e.child(i)));
        return m;
    }
    }
}

TimeIndex max_absolute_read(const Constraint& c) {
    return std::max(max_absolute_read(c.lhs), max_absolute_read(c.rhs));
}

TimeIndex fby_depth(const Expr& e) {
    TimeIndex d = 0;
    for (std::size_t i = 0; i < e.arity(); ++i) d = std::max(d, fby_depth(e.child(i)));
    return e.op() == Op::Fby ? d + 1 : d;
}

}  // namespace stcsp
