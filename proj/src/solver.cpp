#include "stcsp/solver.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include "stcsp/eval.hpp"

namespace stcsp {

namespace {

void serialize(const Expr& e, std::string& out) {
    out += static_cast<char>('A' + static_cast<int>(e.op()));
    switch (e.op()) {
    case Op::Const:
    case Op::At:
        out += std::to_string(e.value());
        out += ';';
        break;
    case Op::Var:
        out += std::to_string(e.var_id().index);
        out += ';';
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < e.arity(); ++i) serialize(e.child(i), out);
}

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
        for (std::int64_t x : v) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

Expr error_marker() { return Expr::binary(Op::Div, Expr::constant(1), Expr::constant(0)); }

struct NoValues {
    std::optional<Value> operator()(VarId, TimeIndex) const { return std::nullopt; }
};

struct Instant {
    const InstantaneousAssignment& tau;
    std::optional<Value> operator()(VarId v, TimeIndex) const { return tau[v.index]; }
};

// Flattened pointwise constraint for fully assigned instants. Evaluation
// yields a value or an error; nothing can be undetermined.
class Program {
public:
    explicit Program(const Constraint& c) {
        kind_ = c.kind;
        rel_ = c.rel;
        lhs_ = add(c.lhs);
        rhs_ = add(c.rhs);
    }

    [[nodiscard]] bool holds(const InstantaneousAssignment& tau) const {
        Value a = 0;
        if (!run(lhs_, tau, a)) return false;
        if (kind_ == ConstraintKind::Implies) {
            if (a == 0) return true;
            Value b = 0;
            return run(rhs_, tau, b) && b != 0;
        }
        Value b = 0;
        if (!run(rhs_, tau, b)) return false;
        return detail::apply_relation(rel_, a, b) != 0;
    }

private:
    struct Cell {
        Op op;
        std::uint32_t a = 0, b = 0, c = 0;
        Value v = 0;
    };

    std::uint32_t add(const Expr& e) {
        if (e.op() == Op::First) return add(e.child(0));
        if (is_temporal(e.op())) throw std::invalid_argument("temporal operator in a pointwise program");
        Cell cell{e.op()};
        if (e.op() == Op::Const) cell.v = e.value();
        else if (e.op() == Op::Var) cell.v = e.var_id().index;
        if (e.arity() > 0) cell.a = add(e.child(0));
        if (e.arity() > 1) cell.b = add(e.child(1));
        if (e.arity() > 2) cell.c = add(e.child(2));
        cells_.push_back(cell);
        return static_cast<std::uint32_t>(cells_.size() - 1);
    }

    bool run(std::uint32_t i, const InstantaneousAssignment& tau, Value& out) const {
        const Cell& c = cells_[i];
        Value a = 0, b = 0;
        switch (c.op) {
        case Op::Const:
            out = c.v;
            return true;
        case Op::Var:
            out = tau[static_cast<std::size_t>(c.v)];
            return true;
        case Op::Not:
            if (!run(c.a, tau, a)) return false;
            out = a == 0 ? 1 : 0;
            return true;
        case Op::Neg:
        case Op::Abs:
            if (!run(c.a, tau, a) || a == INT64_MIN) return false;
            out = c.op == Op::Neg || a < 0 ? -a : a;
            return true;
        case Op::And:
        case Op::Or:
            if (!run(c.a, tau, a)) return false;
            if ((c.op == Op::And) != (a != 0)) {
                out = c.op == Op::Or ? 1 : 0;
                return true;
            }
            if (!run(c.b, tau, b)) return false;
            out = b != 0 ? 1 : 0;
            return true;
        case Op::Ite:
            if (!run(c.a, tau, a)) return false;
            return run(a != 0 ? c.b : c.c, tau, out);
        default:
            if (!run(c.a, tau, a) || !run(c.b, tau, b)) return false;
            switch (c.op) {
            case Op::Lt: out = a < b; return true;
            case Op::Le: out = a <= b; return true;
            case Op::Eq: out = a == b; return true;
            case Op::Ge: out = a >= b; return true;
            case Op::Gt: out = a > b; return true;
            case Op::Ne: out = a != b; return true;
            default: return detail::checked_arith(c.op, a, b, out);
            }
        }
    }

    ConstraintKind kind_;
    Op rel_;
    std::uint32_t lhs_ = 0, rhs_ = 0;
    std::vector<Cell> cells_;
};

void collect_first_vars(const Expr& e, bool under_first, std::vector<std::uint32_t>& out) {
    if (e.is_var() && under_first) out.push_back(e.var_id().index);
    for (std::size_t i = 0; i < e.arity(); ++i) collect_first_vars(e.child(i), under_first || e.op() == Op::First, out);
}

class Engine {
public:
    struct Node {
        std::vector<std::uint32_t> pointwise;  // sorted interned ids
        std::vector<UntilPair> until;
        std::vector<AtTriple> at;
        std::vector<std::pair<std::uint32_t, Value>> historic;
    };

    explicit Engine(const NormalForm& p) : p_(p), var_count_(p.vars.var_count()) {
        for (const auto& c : p.pointwise) {
            if (!c.pointwise()) throw std::invalid_argument("normal form holds a non-pointwise constraint");
        }
    }

    Node root() {
        Node n;
        for (const auto& c : p_.pointwise) n.pointwise.push_back(intern(c));
        n.until = p_.until_pairs;
        n.at = p_.at_triples;
        tidy(n);
        return n;
    }

    std::uint32_t intern(const Constraint& c) {
        std::string key = canonical_key(c);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        Info info;
        info.c = c;
        info.program = Program(c);
        std::vector<VarId> scope = vars_of(c);
        for (VarId v : scope) info.scope.push_back(v.index);
        sort_unique(info.scope);
        collect_first_vars(c.lhs, false, info.first_vars);
        collect_first_vars(c.rhs, false, info.first_vars);
        std::sort(info.first_vars.begin(), info.first_vars.end());
        info.first_vars.erase(std::unique(info.first_vars.begin(), info.first_vars.end()), info.first_vars.end());
        info.has_first = contains_op(c.lhs, Op::First) || contains_op(c.rhs, Op::First);
        auto id = static_cast<std::uint32_t>(infos_.size());
        infos_.push_back(std::move(info));
        ids_.emplace(std::move(key), id);
        return id;
    }

    [[nodiscard]] const Constraint& constraint(std::uint32_t id) const { return infos_[id].c; }

    std::vector<std::int64_t> key(const Node& n) const {
        std::vector<std::int64_t> k;
        k.reserve(4 + n.pointwise.size() + 2 * n.until.size() + 3 * n.at.size() + 2 * n.historic.size());
        k.push_back(static_cast<std::int64_t>(n.pointwise.size()));
        k.insert(k.end(), n.pointwise.begin(), n.pointwise.end());
        k.push_back(static_cast<std::int64_t>(n.until.size()));
        for (const auto& u : n.until) {
            k.push_back(u.lhs.index);
            k.push_back(u.rhs.index);
        }
        k.push_back(static_cast<std::int64_t>(n.at.size()));
        for (const auto& a : n.at) {
            k.push_back(a.lhs.index);
            k.push_back(a.rhs.index);
            k.push_back(a.time);
        }
        k.push_back(static_cast<std::int64_t>(n.historic.size()));
        for (const auto& [v, x] : n.historic) {
            k.push_back(v);
            k.push_back(x);
        }
        return k;
    }

    StateFacts facts(const Node& n) const {
        StateFacts f;
        f.until_count = static_cast<std::uint32_t>(n.until.size());
        f.at_count = static_cast<std::uint32_t>(n.at.size());
        for (std::uint32_t id : n.pointwise) f.first_pending = f.first_pending || infos_[id].has_first;
        return f;
    }

    struct Check {
        bool until;
        std::uint32_t id, a, b;
    };

    struct Plan {
        std::vector<std::uint32_t> order;
        std::vector<std::vector<Check>> checks;  // by position in order
        std::vector<std::uint32_t> constants;
    };

    // Pinned variables first, then greedily the variable that completes the
    // most pending checks, ties broken by shared checks and then by index.
    std::shared_ptr<const Plan> plan(const Node& n) const {
        std::vector<std::int64_t> k;
        k.push_back(static_cast<std::int64_t>(n.pointwise.size()));
        k.insert(k.end(), n.pointwise.begin(), n.pointwise.end());
        for (const auto& u : n.until) {
            k.push_back(u.lhs.index);
            k.push_back(u.rhs.index);
        }
        k.push_back(-1);
        for (const auto& h : n.historic) k.push_back(h.first);
        auto it = plans_.find(k);
        if (it != plans_.end()) return it->second;

        auto out = std::make_shared<Plan>();
        struct Pending {
            Check check;
            std::vector<std::uint32_t> scope;
        };
        std::vector<Pending> pending;
        for (std::uint32_t id : n.pointwise) {
            if (infos_[id].scope.empty()) out->constants.push_back(id);
            else pending.push_back({{false, id, 0, 0}, infos_[id].scope});
        }
        for (const auto& u : n.until) {
            std::vector<std::uint32_t> scope{u.lhs.index, u.rhs.index};
            sort_unique(scope);
            pending.push_back({{true, 0, u.lhs.index, u.rhs.index}, std::move(scope)});
        }
        std::vector<bool> placed(var_count_, false);
        std::vector<bool> done(pending.size(), false);
        auto place = [&](std::uint32_t v) {
            placed[v] = true;
            out->order.push_back(v);
            out->checks.emplace_back();
            for (std::size_t i = 0; i < pending.size(); ++i) {
                if (done[i]) continue;
                bool all = std::all_of(pending[i].scope.begin(), pending[i].scope.end(),
                                       [&](std::uint32_t w) { return placed[w]; });
                if (all) {
                    done[i] = true;
                    out->checks.back().push_back(pending[i].check);
                }
            }
        };
        for (const auto& h : n.historic) {
            if (!placed[h.first]) place(h.first);
        }
        while (out->order.size() < var_count_) {
            std::uint32_t best = 0;
            std::pair<std::size_t, std::size_t> best_score{0, 0};
            bool have = false;
            for (std::uint32_t v = 0; v < var_count_; ++v) {
                if (placed[v]) continue;
                std::size_t completes = 0, shares = 0;
                for (std::size_t i = 0; i < pending.size(); ++i) {
                    if (done[i]) continue;
                    const auto& sc = pending[i].scope;
                    if (!std::binary_search(sc.begin(), sc.end(), v)) continue;
                    std::size_t open = 0;
                    for (std::uint32_t w : sc) open += placed[w] ? 0 : 1;
                    if (open == 1) ++completes;
                    else if (open < sc.size()) ++shares;
                }
                std::pair<std::size_t, std::size_t> score{completes, shares};
                if (!have || score > best_score) {
                    have = true;
                    best = v;
                    best_score = score;
                }
            }
            place(best);
        }
        plans_.emplace(std::move(k), out);
        return out;
    }

    /// Enumeration of the feasible assignments of a node in lexicographic
    /// order. The search itself runs in a per-node variable order chosen so
    /// that constraints are checked as early as possible.
    class Cursor {
    public:
        Cursor(const Engine& e, const Node& n) : e_(&e), lo_(e.var_count_), hi_(e.var_count_) {
            for (std::size_t i = 0; i < e.var_count_; ++i) {
                const Alphabet& a = e.p_.vars.vars()[i].alphabet;
                lo_[i] = a.lo;
                hi_[i] = a.hi;
            }
            for (const auto& [v, x] : n.historic) {
                lo_[v] = std::max(lo_[v], x);
                hi_[v] = std::min(hi_[v], x);
            }
            plan_ = e.plan(n);
        }

        bool next(InstantaneousAssignment& out) {
            if (!ran_) {
                ran_ = true;
                search();
                std::sort(found_.begin(), found_.end());
            }
            if (pos_ == found_.size()) {
                found_.clear();
                found_.shrink_to_fit();
                return false;
            }
            out = std::move(found_[pos_++]);
            return true;
        }

    private:
        void search() {
            const std::size_t n = lo_.size();
            tau_.assign(n, 0);
            for (std::uint32_t id : plan_->constants) {
                if (!e_->infos_[id].program->holds(tau_)) return;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (lo_[i] > hi_[i]) return;
            }
            if (n == 0) {
                found_.push_back(tau_);
                return;
            }
            const auto& order = plan_->order;
            std::size_t k = 0;
            tau_[order[0]] = lo_[order[0]] - 1;
            while (true) {
                std::uint32_t v = order[k];
                if (tau_[v] >= hi_[v]) {
                    if (k == 0) return;
                    --k;
                    continue;
                }
                ++tau_[v];
                if (!position_holds(k)) continue;
                if (k + 1 == n) {
                    found_.push_back(tau_);
                    continue;
                }
                ++k;
                tau_[order[k]] = lo_[order[k]] - 1;
            }
        }

        bool position_holds(std::size_t k) const {
            for (const auto& c : plan_->checks[k]) {
                if (c.until) {
                    if (tau_[c.a] == 0 && tau_[c.b] == 0) return false;
                } else if (!e_->infos_[c.id].program->holds(tau_)) {
                    return false;
                }
            }
            return true;
        }

        const Engine* e_;
        std::vector<Value> lo_, hi_;
        std::shared_ptr<const Plan> plan_;
        InstantaneousAssignment tau_;
        std::vector<InstantaneousAssignment> found_;
        std::size_t pos_ = 0;
        bool ran_ = false;
    };

    Node construct(const Node& n, const InstantaneousAssignment& tau) {
        Node child;
        for (const auto& np : p_.next_pairs) child.historic.emplace_back(np.rhs.index, tau[np.lhs.index]);
        for (const auto& u : n.until) {
            if (tau[u.rhs.index] == 0) child.until.push_back(u);
        }
        for (std::uint32_t id : n.pointwise) {
            if (!infos_[id].has_first) {
                child.pointwise.push_back(id);
                continue;
            }
            std::int64_t r = partial_eval(id, tau);
            if (r >= 0) child.pointwise.push_back(static_cast<std::uint32_t>(r));
        }
        for (const auto& a : n.at) {
            if (a.time > 1) {
                child.at.push_back({a.lhs, a.rhs, a.time - 1});
            } else {
                child.pointwise.push_back(intern(Constraint::relation(Expr::var(a.lhs), Op::Eq,
                                                                      Expr::unary(Op::First, Expr::var(a.rhs)))));
            }
            // xj@t is a constant stream, so its alias keeps the value chosen now
            child.pointwise.push_back(intern(Constraint::relation(Expr::var(a.lhs), Op::Eq,
                                                                  Expr::constant(tau[a.lhs.index]))));
        }
        tidy(child);
        return child;
    }

    Node from_public(const SearchNode& s) {
        Node n;
        for (const auto& c : s.pointwise) n.pointwise.push_back(intern(c));
        n.until = s.until_pairs;
        n.at = s.at_triples;
        for (const auto& [v, x] : s.historic) n.historic.emplace_back(v.index, x);
        tidy(n);
        return n;
    }

    SearchNode to_public(const Node& n) const {
        SearchNode s;
        for (std::uint32_t id : n.pointwise) s.pointwise.push_back(infos_[id].c);
        s.next_pairs = p_.next_pairs;
        s.until_pairs = n.until;
        s.at_triples = n.at;
        for (const auto& [v, x] : n.historic) s.historic.emplace_back(VarId{v}, x);
        return canonicalize(std::move(s));
    }

private:
    struct Info {
        Constraint c;
        std::optional<Program> program;
        std::vector<std::uint32_t> scope;  // variables read, ascending
        std::vector<std::uint32_t> first_vars;
        bool has_first = false;
    };

    template <class T>
    static void sort_unique(std::vector<T>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    static void tidy(Node& n) {
        sort_unique(n.pointwise);
        sort_unique(n.until);
        sort_unique(n.at);
        sort_unique(n.historic);
    }

    // id of the residual constraint, or -1 when it became a tautology
    std::int64_t partial_eval(std::uint32_t id, const InstantaneousAssignment& tau) {
        std::vector<std::int64_t> memo_key{id};
        for (std::uint32_t v : infos_[id].first_vars) memo_key.push_back(tau[v]);
        auto it = memo_.find(memo_key);
        if (it != memo_.end()) return it->second;

        auto step = [&](const Expr& e) -> Expr {
            if (e.op() == Op::First) {
                EvalResult r = evaluate(e.child(0), Instant{tau}, 0);
                if (r.determined()) return Expr::constant(r.value);
                return error_marker();
            }
            if (e.arity() == 0) return e;
            EvalResult r = evaluate(e, NoValues{}, 0);
            return r.determined() ? Expr::constant(r.value) : e;
        };
        Constraint c = infos_[id].c;
        c.lhs = rewrite_bottom_up(c.lhs, step);
        c.rhs = rewrite_bottom_up(c.rhs, step);
        EvalResult truth = evaluate_pointwise(c, NoValues{}, 0);
        std::int64_t result = (truth.determined() && truth.value != 0) ? -1 : static_cast<std::int64_t>(intern(c));
        memo_.emplace(std::move(memo_key), result);
        return result;
    }

    const NormalForm& p_;
    std::size_t var_count_;
    std::vector<Info> infos_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::unordered_map<std::vector<std::int64_t>, std::int64_t, VecHash> memo_;
    mutable std::unordered_map<std::vector<std::int64_t>, std::shared_ptr<const Plan>, VecHash> plans_;
};

}  // namespace

std::string canonical_key(const Constraint& c) {
    std::string out;
    out += static_cast<char>('0' + static_cast<int>(c.kind));
    out += static_cast<char>('A' + static_cast<int>(c.rel));
    serialize(c.lhs, out);
    out += '|';
    serialize(c.rhs, out);
    return out;
}

SearchNode canonicalize(SearchNode n) {
    std::vector<std::pair<std::string, Constraint>> keyed;
    for (auto& c : n.pointwise) keyed.emplace_back(canonical_key(c), std::move(c));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    n.pointwise.clear();
    for (auto& [k, c] : keyed) n.pointwise.push_back(std::move(c));
    auto tidy = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    tidy(n.next_pairs);
    tidy(n.until_pairs);
    tidy(n.at_triples);
    tidy(n.historic);
    return n;
}

SearchNode root_node(const NormalForm& p) {
    Engine e(p);
    return e.to_public(e.root());
}

std::vector<InstantaneousAssignment> feasible_assignments(const NormalForm& p, const SearchNode& n) {
    Engine e(p);
    Engine::Node node = e.from_public(n);
    Engine::Cursor cursor(e, node);
    std::vector<InstantaneousAssignment> out;
    InstantaneousAssignment tau;
    while (cursor.next(tau)) out.push_back(tau);
    return out;
}

SearchNode construct(const NormalForm& p, const SearchNode& n, const InstantaneousAssignment& tau) {
    Engine e(p);
    return e.to_public(e.construct(e.from_public(n), tau));
}

bool are_equal(const SearchNode& a, const SearchNode& b) {
    return canonicalize(a) == canonicalize(b);
}

StCsp node_to_stcsp(const NormalForm& p, const SearchNode& n) {
    StCsp out = p.vars;
    out.constraints().clear();
    for (const auto& c : n.pointwise) out.add_constraint(c);
    for (const auto& x : n.next_pairs)
        out.add_constraint(Constraint::relation(Expr::var(x.lhs), Op::Eq, Expr::unary(Op::Next, Expr::var(x.rhs))));
    for (const auto& u : n.until_pairs) out.add_constraint(Constraint::until(Expr::var(u.lhs), Expr::var(u.rhs)));
    for (const auto& a : n.at_triples)
        out.add_constraint(Constraint::relation(Expr::var(a.lhs), Op::Eq, Expr::at(Expr::var(a.rhs), a.time)));
    for (const auto& [v, x] : n.historic)
        out.add_constraint(Constraint::relation(Expr::unary(Op::First, Expr::var(v)), Op::Eq, Expr::constant(x)));
    return out;
}

SolveResult solve(const NormalForm& p, const SolveOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    Engine engine(p);
    SolveResult result;
    BuchiAutomaton& a = result.automaton;
    SolveStats& stats = result.stats;
    a.vars = p.vars.vars();

    struct Frame {
        StateId state;
        Engine::Node node;
        Engine::Cursor cursor;
        bool any = false;
    };
    std::unordered_map<std::vector<std::int64_t>, StateId, VecHash> seen;
    std::vector<Frame> stack;

    auto emit = [&](Engine::Node node) {
        StateId s = a.add_state(node.until.empty());
        result.facts.push_back(engine.facts(node));
        seen.emplace(engine.key(node), s);
        if (stack.size() >= options.depth_budget) {
            throw BudgetExceeded("depth budget of " + std::to_string(options.depth_budget) + " exceeded");
        }
        Engine::Cursor cursor(engine, node);
        stack.push_back({s, std::move(node), std::move(cursor)});
        return s;
    };

    auto check_interrupt = [&] {
        if (options.cancel && options.cancel->load(std::memory_order_relaxed)) throw SolveInterrupted("solve cancelled");
        if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) throw SolveInterrupted("solve timed out");
    };

    check_interrupt();
    stats.nodes_expanded = 1;
    emit(engine.root());
    InstantaneousAssignment tau;
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (!top.cursor.next(tau)) {
            if (!top.any) ++stats.failures;
            stack.pop_back();
            continue;
        }
        top.any = true;
        StateId from = top.state;
        Engine::Node child = engine.construct(top.node, tau);
        if (++stats.nodes_expanded > options.node_budget) {
            throw BudgetExceeded("node budget of " + std::to_string(options.node_budget) + " exceeded");
        }
        if ((stats.nodes_expanded & 255U) == 0) check_interrupt();
        auto it = seen.find(engine.key(child));
        if (it != seen.end()) {
            ++stats.dominance_hits;
            a.add_transition(from, tau, it->second);
            continue;
        }
        StateId to = emit(std::move(child));
        a.add_transition(from, tau, to);
    }

    stats.states_emitted = a.state_count();
    stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace stcsp
