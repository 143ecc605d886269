#include "stcsp/core_model.hpp"

#include <algorithm>
#include <set>

namespace stcsp {

struct Expr::Node {
    Op op = Op::Const;
    Value value = 0;
    VarId var{};
    std::vector<Expr> kids;
};

bool is_relational(Op op) {
    return op == Op::Lt || op == Op::Le || op == Op::Eq || op == Op::Ge || op == Op::Gt || op == Op::Ne;
}

bool is_temporal(Op op) { return op == Op::Next || op == Op::Fby || op == Op::At; }

std::string_view op_keyword(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Neg: return "-";
    case Op::Abs: return "abs";
    case Op::Lt: return "lt";
    case Op::Le: return "le";
    case Op::Eq: return "eq";
    case Op::Ge: return "ge";
    case Op::Gt: return "gt";
    case Op::Ne: return "ne";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Not: return "not";
    case Op::Ite: return "if";
    case Op::First: return "first";
    case Op::Next: return "next";
    case Op::Fby: return "fby";
    case Op::At: return "@";
    case Op::Const:
    case Op::Var: break;
    }
    return "";
}

// ---- Expr -----------------------------------------------------------------

Expr::Expr() {
    static const auto zero = std::make_shared<const Node>();
    node_ = zero;
}

Expr Expr::constant(Value v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::var(VarId v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = v;
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr operand) {
    if (op != Op::Neg && op != Op::Abs && op != Op::Not && op != Op::First && op != Op::Next)
        throw std::invalid_argument("not a unary operator");
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    switch (op) {
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod:
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ge: case Op::Gt: case Op::Ne:
    case Op::And: case Op::Or: case Op::Fby:
        break;
    default:
        throw std::invalid_argument("not a binary operator");
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids.push_back(std::move(lhs));
    n->kids.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::ite(Expr cond, Expr then_branch, Expr else_branch) {
    auto n = std::make_shared<Node>();
    n->op = Op::Ite;
    n->kids = {std::move(cond), std::move(then_branch), std::move(else_branch)};
    return Expr(std::move(n));
}

Expr Expr::at(Expr operand, Value time) {
    if (time < 1) throw std::invalid_argument("@ requires a time index >= 1");
    auto n = std::make_shared<Node>();
    n->op = Op::At;
    n->value = time;
    n->kids.push_back(std::move(operand));
    return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
Value Expr::value() const { return node_->value; }
VarId Expr::var_id() const { return node_->var; }
std::size_t Expr::arity() const { return node_->kids.size(); }
const Expr& Expr::child(std::size_t i) const { return node_->kids.at(i); }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.op != y.op || x.kids.size() != y.kids.size()) return false;
    if (x.op == Op::Const || x.op == Op::At) {
        if (x.value != y.value) return false;
    }
    if (x.op == Op::Var && x.var != y.var) return false;
    for (std::size_t i = 0; i < x.kids.size(); ++i) {
        if (!(x.kids[i] == y.kids[i])) return false;
    }
    return true;
}

// ---- Constraint -----------------------------------------------------------

Constraint Constraint::relation(Expr lhs, Op rel, Expr rhs) {
    if (!is_relational(rel)) throw std::invalid_argument("constraint relation must be one of < <= == >= > !=");
    return {ConstraintKind::Rel, rel, std::move(lhs), std::move(rhs)};
}

Constraint Constraint::implies(Expr lhs, Expr rhs) {
    return {ConstraintKind::Implies, Op::Eq, std::move(lhs), std::move(rhs)};
}

Constraint Constraint::until(Expr lhs, Expr rhs) {
    return {ConstraintKind::Until, Op::Eq, std::move(lhs), std::move(rhs)};
}

// ---- StCsp ----------------------------------------------------------------

VarId StCsp::add_var(std::string name, Alphabet alphabet) {
    VarId id{static_cast<std::uint32_t>(vars_.size())};
    vars_.push_back({std::move(name), alphabet, VarOrigin::User, 0});
    return id;
}

VarId StCsp::add_aux_var(Alphabet alphabet) {
    VarId id{static_cast<std::uint32_t>(vars_.size())};
    std::uint32_t seq = aux_counter_++;
    vars_.push_back({"_aux" + std::to_string(seq), alphabet, VarOrigin::Auxiliary, seq});
    return id;
}

std::optional<VarId> StCsp::find(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].name == name) return VarId{static_cast<std::uint32_t>(i)};
    }
    return std::nullopt;
}

std::vector<VarId> StCsp::user_vars() const {
    std::vector<VarId> out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].origin == VarOrigin::User) out.push_back(VarId{static_cast<std::uint32_t>(i)});
    }
    return out;
}

// ---- traversals -----------------------------------------------------------

namespace {

void collect_vars(const Expr& e, std::set<VarId>& out) {
    if (e.is_var()) {
        out.insert(e.var_id());
        return;
    }
    for (std::size_t i = 0; i < e.arity(); ++i) collect_vars(e.child(i), out);
}

}  // namespace

std::vector<VarId> vars_of(const Expr& e) {
    std::set<VarId> s;
    collect_vars(e, s);
    return {s.begin(), s.end()};
}

std::vector<VarId> vars_of(const Constraint& c) {
    std::set<VarId> s;
    collect_vars(c.lhs, s);
    collect_vars(c.rhs, s);
    return {s.begin(), s.end()};
}

std::size_t count_temporal(const Expr& e) {
    std::size_t n = is_temporal(e.op()) ? 1 : 0;
    for (std::size_t i = 0; i < e.arity(); ++i) n += count_temporal(e.child(i));
    return n;
}

bool contains_op(const Expr& e, Op op) {
    if (e.op() == op) return true;
    for (std::size_t i = 0; i < e.arity(); ++i) {
        if (contains_op(e.child(i), op)) return true;
    }
    return false;
}

Expr desugar_at(const Expr& e) {
    return rewrite_bottom_up(e, [](const Expr& n) {
        if (n.op() != Op::At) return n;
        Expr inner = n.child(0);
        for (Value i = 0; i < n.value(); ++i) inner = Expr::unary(Op::Next, inner);
        return Expr::unary(Op::First, inner);
    });
}

StCsp desugar_at(const StCsp& p) {
    StCsp out = p;
    for (auto& c : out.constraints()) {
        c.lhs = desugar_at(c.lhs);
        c.rhs = desugar_at(c.rhs);
    }
    return out;
}

}  // namespace stcsp
