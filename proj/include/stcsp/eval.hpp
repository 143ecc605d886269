#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "stcsp/core_model.hpp"

namespace stcsp {

using TimeIndex = std::int64_t;

struct EvalResult {
    enum class Status : std::uint8_t { Value, Undetermined, Error };

    Status status = Status::Undetermined;
    Value value = 0;
    // Set when status == Error: the failing subexpression and its time index.
    std::optional<Expr> error_at;
    TimeIndex error_time = 0;

    static EvalResult of(Value v) { return {Status::Value, v, std::nullopt, 0}; }
    static EvalResult undetermined() { return {}; }
    static EvalResult error(const Expr& e, TimeIndex t) { return {Status::Error, 0, e, t}; }

    [[nodiscard]] bool determined() const { return status == Status::Value; }
    [[nodiscard]] bool is_error() const { return status == Status::Error; }
};

namespace detail {

bool checked_arith(Op op, Value a, Value b, Value& out);
Value apply_relation(Op op, Value a, Value b);

}  // namespace detail

/// Evaluates e at time t. `lookup(VarId, TimeIndex)` returns std::optional<Value>;
/// nullopt means the value is not known (yet).
///
/// Errors dominate undetermined operands; and/or/implication and if-then-else
/// only evaluate the operand they need, left to right.
template <class Lookup>
EvalResult evaluate(const Expr& e, Lookup&& lookup, TimeIndex t) {
    using S = EvalResult::Status;
    switch (e.op()) {
    case Op::Const:
        return EvalResult::of(e.value());
    case Op::Var: {
        if (t < 0) return EvalResult::undetermined();
        std::optional<Value> v = lookup(e.var_id(), t);
        return v ? EvalResult::of(*v) : EvalResult::undetermined();
    }
    case Op::First:
        return evaluate(e.child(0), lookup, 0);
    case Op::Next:
        return evaluate(e.child(0), lookup, t + 1);
    case Op::At:
        return evaluate(e.child(0), lookup, e.value());
    case Op::Fby:
        return t == 0 ? evaluate(e.child(0), lookup, 0) : evaluate(e.child(1), lookup, t - 1);
    case Op::Neg:
    case Op::Abs:
    case Op::Not: {
        EvalResult a = evaluate(e.child(0), lookup, t);
        if (a.status != S::Value) return a;
        if (e.op() == Op::Not) return EvalResult::of(a.value == 0 ? 1 : 0);
        if (a.value == INT64_MIN) return EvalResult::error(e, t);
        if (e.op() == Op::Neg) return EvalResult::of(-a.value);
        return EvalResult::of(a.value < 0 ? -a.value : a.value);
    }
    case Op::And:
    case Op::Or: {
        EvalResult a = evaluate(e.child(0), lookup, t);
        if (a.status != S::Value) return a;
        bool lhs = a.value != 0;
        if (e.op() == Op::And && !lhs) return EvalResult::of(0);
        if (e.op() == Op::Or && lhs) return EvalResult::of(1);
        EvalResult b = evaluate(e.child(1), lookup, t);
        if (b.status != S::Value) return b;
        return EvalResult::of(b.value != 0 ? 1 : 0);
    }
    case Op::Ite: {
        EvalResult c = evaluate(e.child(0), lookup, t);
        if (c.status != S::Value) return c;
        return evaluate(e.child(c.value != 0 ? 1 : 2), lookup, t);
    }
    default: {
        EvalResult a = evaluate(e.child(0), lookup, t);
        if (a.is_error()) return a;
        EvalResult b = evaluate(e.child(1), lookup, t);
        if (b.is_error()) return b;
        if (!a.determined() || !b.determined()) return EvalResult::undetermined();
        if (is_relational(e.op())) return EvalResult::of(detail::apply_relation(e.op(), a.value, b.value));
        Value out = 0;
        if (!detail::checked_arith(e.op(), a.value, b.value, out)) return EvalResult::error(e, t);
        return EvalResult::of(out);
    }
    }
}

/// Truth of a pointwise constraint at time t: Value 1/0, undetermined, or error.
template <class Lookup>
EvalResult evaluate_pointwise(const Constraint& c, Lookup&& lookup, TimeIndex t) {
    if (c.kind == ConstraintKind::Implies) {
        EvalResult a = evaluate(c.lhs, lookup, t);
        if (!a.determined()) return a;
        if (a.value == 0) return EvalResult::of(1);
        EvalResult b = evaluate(c.rhs, lookup, t);
        if (!b.determined()) return b;
        return EvalResult::of(b.value != 0 ? 1 : 0);
    }
    EvalResult a = evaluate(c.lhs, lookup, t);
    if (a.is_error()) return a;
    EvalResult b = evaluate(c.rhs, lookup, t);
    if (b.is_error()) return b;
    if (!a.determined() || !b.determined()) return EvalResult::undetermined();
    return EvalResult::of(detail::apply_relation(c.rel, a.value, b.value));
}

/// Value of e at time t under the prefix; undetermined when the prefix is too short.
EvalResult eval_ground(const Expr& e, const StreamPrefix& prefix, TimeIndex t);

struct PrefixStatus {
    enum class Kind : std::uint8_t { Violated, ConsistentSoFar, FinallySatisfied };
    Kind kind = Kind::ConsistentSoFar;
    TimeIndex time = 0;  // violation time or satisfaction time

    static PrefixStatus violated(TimeIndex t) { return {Kind::Violated, t}; }
    static PrefixStatus consistent() { return {Kind::ConsistentSoFar, 0}; }
    static PrefixStatus satisfied(TimeIndex t) { return {Kind::FinallySatisfied, t}; }
    friend bool operator==(const PrefixStatus&, const PrefixStatus&) = default;
};

PrefixStatus check_prefix(const Constraint& c, const StreamPrefix& prefix);

// ---- read-window analysis -------------------------------------------------

/// Offsets, relative to the evaluation time, of the variable reads an
/// expression performs once the evaluation time is past every fby head.
/// nullopt when e reads nothing relative (constants, first/@ only).
struct RelativeWindow {
    TimeIndex min_offset = 0;
    TimeIndex max_offset = 0;
};
std::optional<RelativeWindow> relative_window(const Expr& e);
std::optional<RelativeWindow> relative_window(const Constraint& c);

/// Largest absolute time read by first/@ subexpressions; -1 if none.
TimeIndex max_absolute_read(const Expr& e);
TimeIndex max_absolute_read(const Constraint& c);

/// Largest time read when evaluating e at time t (all branches); -1 if none.
TimeIndex max_read_at(const Expr& e, TimeIndex t);

/// Deepest fby nesting, i.e. how far below the evaluation time fby heads matter.
TimeIndex fby_depth(const Expr& e);

}  // namespace stcsp
