#include "stcsp/benchgen.hpp"

#include <sstream>
#include <stdexcept>

namespace stcsp {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

namespace {

void append_goal(std::ostringstream& os, const std::string& eventually, const std::string& var, const Variant& v) {
    if (v.kind == Variant::Kind::Until) {
        os << "1 until " << eventually << ";\n";
    } else {
        if (v.t < 1) throw std::invalid_argument("@ time must be at least 1");
        os << var << " @ " << v.t << " == 1;\n";
    }
}

}  // namespace

ModelSource gen_mc(const McParams& params) {
    if (params.n < 1 || params.b < 2) throw std::invalid_argument("missionaries need n >= 1 and b >= 2");
    const int n = params.n;
    const int b = params.b;
    std::ostringstream os;
    os << "// missionaries and cannibals, n = " << n << ", b = " << b << "\n";
    os << "var leftmissionaries, rightmissionaries, leftcannibals, rightcannibals with alphabet [0.." << n << "];\n";
    os << "var boat, succ with alphabet [0..1];\n\n";
    os << "first leftmissionaries == " << n << ";\n";
    os << "first leftcannibals == " << n << ";\n";
    os << "first rightmissionaries == 0;\n";
    os << "first rightcannibals == 0;\n";
    os << "first boat == 0;\n\n";
    os << "leftcannibals <= if leftmissionaries eq 0 then " << n << " else leftmissionaries;\n";
    os << "rightcannibals <= if rightmissionaries eq 0 then " << n << " else rightmissionaries;\n\n";
    const std::string load =
        "abs(leftmissionaries - next leftmissionaries) + abs(leftcannibals - next leftcannibals)";
    os << load << " >= if succ then 0 else 1;\n";
    os << load << " <= " << b << ";\n\n";
    os << "leftmissionaries - next leftmissionaries == next rightmissionaries - rightmissionaries;\n";
    os << "leftcannibals - next leftcannibals == next rightcannibals - rightcannibals;\n\n";
    os << "boat eq 1 <= (leftmissionaries - next leftmissionaries) le 0;\n";
    os << "boat eq 1 <= (leftcannibals - next leftcannibals) le 0;\n";
    os << "boat eq 0 <= (leftmissionaries - next leftmissionaries) ge 0;\n";
    os << "boat eq 0 <= (leftcannibals - next leftcannibals) ge 0;\n\n";
    os << "next boat == if succ then boat else if boat eq 1 then 0 else 1;\n\n";
    os << "succ == rightmissionaries eq " << n << " and rightcannibals eq " << n << ";\n\n";
    os << "succ <= (next leftmissionaries) eq leftmissionaries;\n";
    os << "succ <= (next leftcannibals) eq leftcannibals;\n\n";
    append_goal(os, "succ", "succ", params.variant);
    return {os.str(), "<mc>"};
}

GridInstance sample_grid(const GridParams& params) {
    if (params.n < 1) throw std::invalid_argument("grid side must be at least 1");
    if (!(params.p >= 0.0 && params.p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
    const int n = params.n;
    auto inside = [n](Cell c) { return c.row >= 1 && c.row <= n && c.col >= 1 && c.col <= n; };
    SplitMix64 rng(params.seed);
    GridInstance g;
    g.n = n;
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            for (int d = 0; d < 4; ++d) {
                Cell to{i + dr[d], j + dc[d]};
                if (!inside(to)) continue;
                if (rng.uniform() < params.p) g.edges.push_back({Cell{i, j}, to});
            }
        }
    }
    auto draw = [&]() {
        auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        auto c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        return Cell{r + 1, c + 1};
    };
    g.start = params.start ? *params.start : draw();
    g.end = params.end ? *params.end : draw();
    if (!inside(g.start) || !inside(g.end)) throw std::invalid_argument("start and end must lie on the grid");
    return g;
}

ModelSource gen_grid(const GridInstance& g, const Variant& variant) {
    std::ostringstream os;
    os << "// path planning on a " << g.n << "x" << g.n << " grid, " << g.edges.size() << " edges\n";
    os << "var x, y with alphabet [1.." << g.n << "];\n";
    os << "var goal with alphabet [0..1];\n\n";
    os << "first x == " << g.start.row << ";\n";
    os << "first y == " << g.start.col << ";\n\n";
    for (int i = 1; i <= g.n; ++i) {
        for (int j = 1; j <= g.n; ++j) {
            os << "((next x eq " << i << ") and (next y eq " << j << ")) -> ((x eq " << i << " and y eq " << j << ")";
            for (const auto& [from, to] : g.edges) {
                if (to == Cell{i, j}) os << " or (x eq " << from.row << " and y eq " << from.col << ")";
            }
            os << ");\n";
        }
    }
    os << "\ngoal == (x eq " << g.end.row << " and y eq " << g.end.col << ") or (0 fby goal);\n";
    os << "goal eq 1 -> ((x eq next x) and (y eq next y));\n";
    append_goal(os, "(goal eq 1)", "goal", variant);
    return {os.str(), "<grid>"};
}

ModelSource gen_grid(const GridParams& params) { return gen_grid(sample_grid(params), params.variant); }

}  // namespace stcsp
