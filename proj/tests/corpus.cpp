#include "corpus.hpp"

#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "stcsp/parser.hpp"

namespace corpus {

namespace {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    Model model(std::size_t index) {
        nvars_ = 1 + static_cast<int>(rng_.below(2));
        std::string text;
        for (int v = 0; v < nvars_; ++v) {
            hi_[v] = 1 + static_cast<int>(rng_.below(2));
            text += "var " + name(v) + " with alphabet [0.." + std::to_string(hi_[v]) + "];\n";
        }
        const int count = 1 + static_cast<int>(rng_.below(3));
        for (int i = 0; i < count; ++i) text += constraint() + ";\n";
        return {"m" + std::to_string(index), text};
    }

private:
    static std::string name(int v) { return v == 0 ? "x" : "y"; }

    int pick(int n) { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(n))); }
    int var() { return pick(nvars_); }
    std::string konst(int v) { return std::to_string(pick(hi_[v] + 1)); }

    std::string rel() {
        static const char* ops[] = {"==", "!=", "<", "<=", ">=", ">"};
        return ops[pick(6)];
    }

    std::string infix_rel() {
        static const char* ops[] = {"eq", "ne", "lt", "le", "ge", "gt"};
        return ops[pick(6)];
    }

    // temporal-free term of depth <= 2
    std::string term(int depth, bool allow_divmod) {
        int choice = depth == 0 ? pick(2) : pick(allow_divmod ? 8 : 7);
        switch (choice) {
        case 0:
            return name(var());
        case 1:
            return std::to_string(pick(3));
        case 2:
            return "(" + term(depth - 1, allow_divmod) + " + " + term(depth - 1, allow_divmod) + ")";
        case 3:
            return "(" + term(depth - 1, allow_divmod) + " - " + term(depth - 1, allow_divmod) + ")";
        case 4:
            return "abs(" + term(depth - 1, allow_divmod) + ")";
        case 5:
            return "(" + term(depth - 1, allow_divmod) + " " + infix_rel() + " " + term(depth - 1, allow_divmod) + ")";
        case 6:
            return "(if " + term(depth - 1, allow_divmod) + " then " + term(depth - 1, allow_divmod) + " else " +
                   term(depth - 1, allow_divmod) + ")";
        default:
            return "(" + term(depth - 1, true) + (pick(2) ? " / " : " % ") + term(depth - 1, true) + ")";
        }
    }

    std::string small() { return term(pick(2), false); }

    std::string constraint() {
        const int v = var();
        const std::string x = name(v);
        switch (pick(8)) {
        case 0:
            return term(1 + pick(2), true) + " " + rel() + " " + term(1, true);
        case 1:
            return small() + " -> " + small();
        case 2:
            return "next " + x + " " + rel() + " " + small();
        case 3:
            return x + " " + rel() + " " + konst(v) + " fby " + small();
        case 4:
            return "(" + x + " " + infix_rel() + " " + konst(v) + ") until (" + small() + ")";
        case 5:
            return x + " " + rel() + " " + name(var()) + " @ " + std::to_string(1 + pick(2));
        case 6:
            return "first " + x + " " + rel() + " " + konst(v);
        default:
            return "(" + x + " + next " + name(var()) + ") " + rel() + " " + std::to_string(pick(4));
        }
    }

    stcsp::SplitMix64 rng_;
    int nvars_ = 1;
    int hi_[2] = {1, 1};
};

}  // namespace

std::vector<Model> random_models(std::size_t count, std::uint64_t seed) {
    Gen g(seed);
    std::vector<Model> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(g.model(i));
    return out;
}

stcsp::StCsp parse(const Model& m) { return stcsp::parse_or_throw({m.text, m.name}); }

namespace {

// boat 0: on the starting bank, so a crossing moves people away from it
template <class F>
void mc_moves(int n, int b, std::tuple<int, int, int> s, F&& f) {
    auto [m, c, boat] = s;
    auto safe = [n](int lm, int lc) { return (lm == 0 || lm >= lc) && (n - lm == 0 || n - lm >= n - lc); };
    const int dir = boat == 0 ? -1 : 1;
    for (int dm = 0; dm <= b; ++dm) {
        for (int dc = 0; dm + dc <= b; ++dc) {
            if (dm + dc == 0) continue;
            int nm = m + dir * dm, nc = c + dir * dc;
            if (nm < 0 || nm > n || nc < 0 || nc > n || !safe(nm, nc)) continue;
            f(std::tuple{nm, nc, 1 - boat});
        }
    }
}

}  // namespace

std::optional<int> mc_shortest_plan(int n, int b) {
    using S = std::tuple<int, int, int>;
    std::map<S, int> dist{{S{n, n, 0}, 0}};
    std::queue<S> q;
    q.push(S{n, n, 0});
    while (!q.empty()) {
        S s = q.front();
        q.pop();
        if (std::get<0>(s) == 0 && std::get<1>(s) == 0) return dist[s];
        mc_moves(n, b, s, [&](S t) {
            if (dist.emplace(t, dist[s] + 1).second) q.push(t);
        });
    }
    return std::nullopt;
}

std::size_t mc_reachable_states(int n, int b) {
    using S = std::tuple<int, int, int>;
    std::set<S> seen{S{n, n, 0}};
    std::vector<S> stack{S{n, n, 0}};
    while (!stack.empty()) {
        S s = stack.back();
        stack.pop_back();
        mc_moves(n, b, s, [&](S t) {
            if (seen.insert(t).second) stack.push_back(t);
        });
    }
    return seen.size();
}

std::optional<int> grid_shortest_path(const stcsp::GridInstance& g) {
    std::map<std::pair<int, int>, int> dist{{{g.start.row, g.start.col}, 0}};
    std::queue<std::pair<int, int>> q;
    q.push({g.start.row, g.start.col});
    while (!q.empty()) {
        auto cur = q.front();
        q.pop();
        if (cur == std::pair{g.end.row, g.end.col}) return dist[cur];
        for (const auto& [from, to] : g.edges) {
            if (std::pair{from.row, from.col} != cur) continue;
            if (dist.emplace(std::pair{to.row, to.col}, dist[cur] + 1).second) q.push({to.row, to.col});
        }
    }
    return std::nullopt;
}

std::vector<stcsp::StreamPrefix> all_prefixes(const std::vector<stcsp::Alphabet>& alphabets, std::size_t L) {
    std::vector<stcsp::InstantaneousAssignment> letters{{}};
    for (const auto& a : alphabets) {
        std::vector<stcsp::InstantaneousAssignment> grown;
        for (const auto& l : letters) {
            for (stcsp::Value v = a.lo; v <= a.hi; ++v) {
                grown.push_back(l);
                grown.back().push_back(v);
            }
        }
        letters = std::move(grown);
    }
    std::vector<stcsp::StreamPrefix> out{{}};
    for (std::size_t t = 0; t < L; ++t) {
        std::vector<stcsp::StreamPrefix> grown;
        for (const auto& p : out) {
            for (const auto& l : letters) {
                grown.push_back(p);
                grown.back().steps.push_back(l);
            }
        }
        out = std::move(grown);
    }
    return out;
}

}  // namespace corpus
