#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stcsp {

using Value = std::int64_t;

/// Inclusive integer interval [lo..hi] used as a stream alphabet.
struct Alphabet {
    Value lo = 0;
    Value hi = 0;

    Alphabet() = default;
    Alphabet(Value lo_, Value hi_) : lo(lo_), hi(hi_) {
        if (lo > hi) throw std::invalid_argument("alphabet lower bound exceeds upper bound");
    }

    [[nodiscard]] std::uint64_t size() const { return static_cast<std::uint64_t>(hi - lo) + 1; }
    [[nodiscard]] bool contains(Value v) const { return v >= lo && v <= hi; }
    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

struct VarId {
    std::uint32_t index = 0;
    friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class VarOrigin : std::uint8_t { User, Auxiliary };

struct VarInfo {
    std::string name;
    Alphabet alphabet;
    VarOrigin origin = VarOrigin::User;
    std::uint32_t aux_seq = 0;  // creation counter, auxiliaries only
    friend bool operator==(const VarInfo&, const VarInfo&) = default;
};

enum class Op : std::uint8_t {
    Const, Var,
    Add, Sub, Mul, Div, Mod,
    Neg, Abs,
    Lt, Le, Eq, Ge, Gt, Ne,
    And, Or, Not,
    Ite,
    First, Next, Fby, At,
};

[[nodiscard]] bool is_relational(Op op);
[[nodiscard]] bool is_temporal(Op op);  // Next, Fby, At
[[nodiscard]] std::string_view op_keyword(Op op);

/// Immutable stream expression. Copies share structure.
class Expr {
public:
    Expr();  // Const 0

    static Expr constant(Value v);
    static Expr var(VarId v);
    static Expr unary(Op op, Expr operand);
    static Expr binary(Op op, Expr lhs, Expr rhs);
    static Expr ite(Expr cond, Expr then_branch, Expr else_branch);
    static Expr at(Expr operand, Value time);

    [[nodiscard]] Op op() const;
    [[nodiscard]] Value value() const;   // Const literal, or At's time index
    [[nodiscard]] VarId var_id() const;  // Var only
    [[nodiscard]] std::size_t arity() const;
    [[nodiscard]] const Expr& child(std::size_t i) const;

    [[nodiscard]] bool is_const() const { return op() == Op::Const; }
    [[nodiscard]] bool is_var() const { return op() == Op::Var; }
    [[nodiscard]] bool same_node(const Expr& other) const { return node_ == other.node_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

enum class ConstraintKind : std::uint8_t { Rel, Implies, Until };

/// Rel: lhs R rhs at every time point. Implies: lhs -> rhs pointwise.
/// Until: lhs until rhs (not pointwise).
struct Constraint {
    ConstraintKind kind = ConstraintKind::Rel;
    Op rel = Op::Eq;  // Lt..Ne, Rel only
    Expr lhs;
    Expr rhs;

    static Constraint relation(Expr lhs, Op rel, Expr rhs);
    static Constraint implies(Expr lhs, Expr rhs);
    static Constraint until(Expr lhs, Expr rhs);

    [[nodiscard]] bool pointwise() const { return kind != ConstraintKind::Until; }
    friend bool operator==(const Constraint&, const Constraint&) = default;
};

class StCsp {
public:
    VarId add_var(std::string name, Alphabet alphabet);
    VarId add_aux_var(Alphabet alphabet);
    void add_constraint(Constraint c) { constraints_.push_back(std::move(c)); }

    [[nodiscard]] std::size_t var_count() const { return vars_.size(); }
    [[nodiscard]] const VarInfo& var(VarId v) const { return vars_.at(v.index); }
    [[nodiscard]] const std::vector<VarInfo>& vars() const { return vars_; }
    [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
    [[nodiscard]] std::vector<Constraint>& constraints() { return constraints_; }
    [[nodiscard]] std::optional<VarId> find(std::string_view name) const;
    [[nodiscard]] std::uint32_t aux_count() const { return aux_counter_; }

    /// Indices of user-declared variables, in declaration order.
    [[nodiscard]] std::vector<VarId> user_vars() const;

    friend bool operator==(const StCsp&, const StCsp&) = default;

private:
    std::vector<VarInfo> vars_;
    std::vector<Constraint> constraints_;
    std::uint32_t aux_counter_ = 0;
};

/// One value per variable at a single time point (tau).
using InstantaneousAssignment = std::vector<Value>;

struct StreamPrefix {
    std::vector<InstantaneousAssignment> steps;

    [[nodiscard]] std::size_t length() const { return steps.size(); }
    friend auto operator<=>(const StreamPrefix&, const StreamPrefix&) = default;
};

/// Collects the variables referenced anywhere in e (ascending, unique).
[[nodiscard]] std::vector<VarId> vars_of(const Expr& e);
[[nodiscard]] std::vector<VarId> vars_of(const Constraint& c);

/// Number of Next/Fby/At nodes in e.
[[nodiscard]] std::size_t count_temporal(const Expr& e);
[[nodiscard]] bool contains_op(const Expr& e, Op op);

/// Rewrites every At(e, t) into First(Next^t(e)).
[[nodiscard]] Expr desugar_at(const Expr& e);
[[nodiscard]] StCsp desugar_at(const StCsp& p);

/// Applies f bottom-up; f receives a node whose children are already rewritten.
template <class F>
Expr rewrite_bottom_up(const Expr& e, F&& f) {
    switch (e.arity()) {
    case 0:
        return f(e);
    case 1: {
        Expr c = rewrite_bottom_up(e.child(0), f);
        if (e.op() == Op::At) return f(c.same_node(e.child(0)) ? e : Expr::at(c, e.value()));
        return f(c.same_node(e.child(0)) ? e : Expr::unary(e.op(), c));
    }
    case 2: {
        Expr a = rewrite_bottom_up(e.child(0), f);
        Expr b = rewrite_bottom_up(e.child(1), f);
        bool same = a.same_node(e.child(0)) && b.same_node(e.child(1));
        return f(same ? e : Expr::binary(e.op(), a, b));
    }
    default: {
        Expr a = rewrite_bottom_up(e.child(0), f);
        Expr b = rewrite_bottom_up(e.child(1), f);
        Expr c = rewrite_bottom_up(e.child(2), f);
        bool same = a.same_node(e.child(0)) && b.same_node(e.child(1)) && c.same_node(e.child(2));
        return f(same ? e : Expr::ite(a, b, c));
    }
    }
}

}  // namespace stcsp
