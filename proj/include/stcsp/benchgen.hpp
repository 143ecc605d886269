#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stcsp/core_model.hpp"
#include "stcsp/parser.hpp"

namespace stcsp {

/// Goal condition appended to a generated model.
struct Variant {
    enum class Kind { Until, At };
    Kind kind = Kind::Until;
    Value t = 1;

    static Variant until() { return {}; }
    static Variant at(Value t) { return {Kind::At, t}; }
};

struct McParams {
    int n = 3;  // missionaries, and as many cannibals
    int b = 2;  // boat capacity
    Variant variant;
};

struct Cell {
    int row = 1;
    int col = 1;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridParams {
    int n = 2;
    double p = 1.0;
    std::uint64_t seed = 0;
    std::optional<Cell> start;
    std::optional<Cell> end;
    Variant variant;
};

/// splitmix64: state += 0x9E3779B97F4A7C15, then two xor-shift-multiply rounds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();                     // [0, 1) with 53 random bits
    std::uint64_t below(std::uint64_t n);  // [0, n)

private:
    std::uint64_t state_;
};

struct GridInstance {
    int n = 0;
    Cell start, end;
    std::vector<std::pair<Cell, Cell>> edges;  // directed, from -> to
};

/// Edges are drawn first (cells row-major, neighbours up, down, left, right),
/// then any missing start and end cell.
GridInstance sample_grid(const GridParams& params);

ModelSource gen_mc(const McParams& params);
ModelSource gen_grid(const GridParams& params);
ModelSource gen_grid(const GridInstance& grid, const Variant& variant);

}  // namespace stcsp
