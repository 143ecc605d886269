#include "stcsp/oracle.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace stcsp::oracle {

namespace {

std::uint64_t step_count(const StCsp& p) {
    std::uint64_t n = 1;
    for (const auto& v : p.vars()) {
        n *= v.alphabet.size();
        if (n > (1ULL << 40)) return n;
    }
    return n;
}

void check_cap(const StCsp& p, std::size_t L, std::uint64_t cap) {
    std::uint64_t per = step_count(p), total = 1;
    for (std::size_t i = 0; i < L; ++i) {
        total *= per;
        if (total > cap) {
            throw CapExceeded("alphabet product ^ " + std::to_string(L) + " exceeds cap " + std::to_string(cap));
        }
    }
}

// successor labels of one step, lexicographic
std::vector<InstantaneousAssignment> all_steps(const StCsp& p) {
    std::vector<InstantaneousAssignment> out{{}};
    for (const auto& v : p.vars()) {
        std::vector<InstantaneousAssignment> next;
        for (const auto& partial : out) {
            for (Value x = v.alphabet.lo; x <= v.alphabet.hi; ++x) {
                auto ext = partial;
                ext.push_back(x);
                next.push_back(std::move(ext));
            }
        }
        out = std::move(next);
    }
    return out;
}

bool violates(const StCsp& p, const StreamPrefix& prefix) {
    for (const auto& c : p.constraints()) {
        if (check_prefix(c, prefix).kind == PrefixStatus::Kind::Violated) return true;
    }
    return false;
}

StreamPrefix project_prefix(const StreamPrefix& s, const Projection& project) {
    if (!project) return s;
    StreamPrefix out;
    for (const auto& step : s.steps) {
        InstantaneousAssignment t;
        for (std::uint32_t i : *project) t.push_back(step.at(i));
        out.steps.push_back(std::move(t));
    }
    return out;
}

void collect_absolute(const Expr& e, std::vector<Expr>& out) {
    if (e.op() == Op::First || e.op() == Op::At) out.push_back(e);
    for (std::size_t i = 0; i < e.arity(); ++i) collect_absolute(e.child(i), out);
}

struct Shape {
    TimeIndex lookahead = 0;
    TimeIndex lookback = 0;
    TimeIndex fby = 0;
    TimeIndex absolute = -1;
    std::vector<Expr> absolute_exprs;
};

Shape shape_of(const StCsp& p) {
    Shape s;
    for (const auto& c : p.constraints()) {
        if (auto w = relative_window(c)) {
            s.lookahead = std::max(s.lookahead, w->max_offset);
            s.lookback = std::max(s.lookback, -w->min_offset);
        }
        s.fby = std::max({s.fby, fby_depth(c.lhs), fby_depth(c.rhs)});
        s.absolute = std::max(s.absolute, max_absolute_read(c));
        collect_absolute(c.lhs, s.absolute_exprs);
        collect_absolute(c.rhs, s.absolute_exprs);
    }
    return s;
}

struct GraphNode {
    StreamPrefix rep;
    std::size_t depth = 0;
    bool all_satisfied = false;
    std::vector<std::size_t> succ;
};

}  // namespace

PrefixClass classify(const StCsp& p, const StreamPrefix& prefix) {
    PrefixClass out{prefix, {}};
    for (const auto& c : p.constraints()) out.status.push_back(check_prefix(c, prefix));
    return out;
}

std::set<StreamPrefix> enumerate(const StCsp& p, std::size_t L, const Projection& project, std::uint64_t cap) {
    check_cap(p, L, cap);
    const auto steps = all_steps(p);
    std::set<StreamPrefix> out;
    std::vector<StreamPrefix> layer{StreamPrefix{}};
    for (std::size_t d = 0; d < L; ++d) {
        std::vector<StreamPrefix> next;
        for (const auto& s : layer) {
            for (const auto& t : steps) {
                StreamPrefix ext = s;
                ext.steps.push_back(t);
                if (!violates(p, ext)) next.push_back(std::move(ext));
            }
        }
        layer = std::move(next);
    }
    for (const auto& s : layer) out.insert(project_prefix(s, project));
    return out;
}

std::size_t default_horizon(const StCsp& p, std::size_t L) {
    Shape s = shape_of(p);
    return L + static_cast<std::size_t>(s.absolute + s.lookahead + s.lookback + s.fby) + 256;
}

std::set<StreamPrefix> solution_prefixes(const StCsp& p, std::size_t L, std::size_t H, const Projection& project,
                                         std::uint64_t cap) {
    if (H < L) throw std::invalid_argument("horizon must be at least L");
    const Shape shape = shape_of(p);
    const auto window = static_cast<std::size_t>(shape.lookahead + shape.lookback + 1);
    const auto settle = static_cast<std::size_t>(
        std::max<TimeIndex>({shape.absolute + 1, shape.fby + shape.lookahead, static_cast<TimeIndex>(window)}));
    // prefixes up to this depth stay distinct; deeper ones merge by key
    const std::size_t exact_depth = std::max(L, settle > 0 ? settle - 1 : 0);
    check_cap(p, exact_depth, cap);

    const auto steps = all_steps(p);
    std::vector<std::size_t> untils;
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
        if (!p.constraints()[i].pointwise()) untils.push_back(i);
    }

    std::vector<GraphNode> nodes;
    std::map<std::vector<Value>, std::size_t> merged;

    auto key_of = [&](const StreamPrefix& s, const std::vector<PrefixStatus>& status) {
        std::vector<Value> k;
        for (std::size_t i = s.length() - window; i < s.length(); ++i) k.insert(k.end(), s.steps[i].begin(), s.steps[i].end());
        for (const auto& e : shape.absolute_exprs) {
            EvalResult r = eval_ground(e, s, 0);
            k.push_back(static_cast<Value>(r.status));
            k.push_back(r.value);
        }
        for (std::size_t i : untils) k.push_back(status[i].kind == PrefixStatus::Kind::FinallySatisfied ? 1 : 0);
        return k;
    };
    auto satisfied_all = [&](const std::vector<PrefixStatus>& status) {
        for (std::size_t i : untils) {
            if (status[i].kind != PrefixStatus::Kind::FinallySatisfied) return false;
        }
        return true;
    };

    nodes.push_back({StreamPrefix{}, 0, untils.empty(), {}});
    bool open_frontier = false;
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        if (nodes[head].depth >= H) {
            open_frontier = true;
            continue;
        }
        for (const auto& t : steps) {
            StreamPrefix ext = nodes[head].rep;
            ext.steps.push_back(t);
            PrefixClass cls = classify(p, ext);
            bool bad = std::any_of(cls.status.begin(), cls.status.end(),
                                   [](const PrefixStatus& s) { return s.kind == PrefixStatus::Kind::Violated; });
            if (bad) continue;
            const std::size_t depth = nodes[head].depth + 1;
            std::size_t target;
            if (depth <= exact_depth) {
                target = nodes.size();
                nodes.push_back({std::move(ext), depth, satisfied_all(cls.status), {}});
            } else {
                auto k = key_of(ext, cls.status);
                auto it = merged.find(k);
                if (it != merged.end()) {
                    target = it->second;
                } else {
                    target = nodes.size();
                    merged.emplace(std::move(k), target);
                    nodes.push_back({std::move(ext), depth, satisfied_all(cls.status), {}});
                }
            }
            nodes[head].succ.push_back(target);
            if (nodes.size() > cap) throw CapExceeded("oracle graph exceeds " + std::to_string(cap) + " nodes");
        }
    }
    if (open_frontier) throw Inconclusive("oracle graph not closed within horizon " + std::to_string(H));

    // good: all untils discharged and an infinite path stays among such nodes
    const std::size_t n = nodes.size();
    std::vector<bool> good(n);
    std::vector<std::size_t> live_succ(n, 0);
    std::vector<std::vector<std::size_t>> preds(n);
    for (std::size_t i = 0; i < n; ++i) {
        good[i] = nodes[i].all_satisfied;
        for (std::size_t j : nodes[i].succ) preds[j].push_back(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!good[i]) continue;
        for (std::size_t j : nodes[i].succ) live_succ[i] += good[j] ? 1 : 0;
    }
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < n; ++i) {
        if (good[i] && live_succ[i] == 0) work.push_back(i);
    }
    while (!work.empty()) {
        std::size_t i = work.back();
        work.pop_back();
        if (!good[i]) continue;
        good[i] = false;
        for (std::size_t pred : preds[i]) {
            if (good[pred] && --live_succ[pred] == 0) work.push_back(pred);
        }
    }
    std::vector<bool> extendable = good;
    work.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (good[i]) work.push_back(i);
    }
    while (!work.empty()) {
        std::size_t i = work.back();
        work.pop_back();
        for (std::size_t pred : preds[i]) {
            if (!extendable[pred]) {
                extendable[pred] = true;
                work.push_back(pred);
            }
        }
    }

    std::set<StreamPrefix> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (nodes[i].depth == L && extendable[i]) out.insert(project_prefix(nodes[i].rep, project));
    }
    return out;
}

}  // namespace stcsp::oracle
