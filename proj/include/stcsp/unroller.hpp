#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stcsp/core_model.hpp"
#include "stcsp/eval.hpp"

namespace stcsp {

/// One copy of a stream variable at one time point.
struct FdVar {
    VarId stream;
    TimeIndex time = 0;
    Alphabet alphabet;
};

struct FdConstraint {
    enum class Kind { Pointwise, Eventually };
    Kind kind = Kind::Pointwise;
    Constraint source;
    TimeIndex time = 0;               // Pointwise: instantiation time
    std::vector<TimeIndex> options;   // Eventually: admissible discharge times
    std::vector<std::uint32_t> scope;  // FdVar indices, ascending
};

/// Finite-domain CSP over a horizon: variable (x, t) has index t * |X| + x.
struct FdCsp {
    StCsp model;
    TimeIndex horizon = 0;
    std::vector<FdVar> vars;
    std::vector<FdConstraint> constraints;
    bool unsat_by_construction = false;
    std::string reason;

    [[nodiscard]] std::uint32_t index(VarId v, TimeIndex t) const {
        return static_cast<std::uint32_t>(t * static_cast<TimeIndex>(model.var_count()) + v.index);
    }
};

/// Instantiates every constraint at the offsets whose reads fall inside
/// [0, T); an until becomes a disjunction over discharge times i < T.
FdCsp unroll(const StCsp& p, TimeIndex T);

struct HorizonResult {
    enum class Outcome { Sat, Unsat, BudgetExceeded };
    TimeIndex horizon = 0;
    Outcome outcome = Outcome::Unsat;
    std::optional<StreamPrefix> assignment;  // first solution, as a prefix of length horizon
    std::vector<StreamPrefix> solutions;     // mode All
    std::uint64_t solution_count = 0;        // modes All and Count
    std::uint64_t nodes = 0;
};

enum class FdMode { First, All, Count };

/// Chronological backtracking in index order, values ascending, with
/// forward checking on constraints that have one unassigned variable left.
HorizonResult fd_solve(const FdCsp& c, FdMode mode = FdMode::First, std::uint64_t node_budget = 50'000'000);

/// Smallest T <= t_max whose unrolling is satisfiable; Unsat with horizon
/// t_max when none is.
HorizonResult increment_until_sat(const StCsp& p, TimeIndex t_max, std::uint64_t node_budget = 50'000'000);

/// Default horizon cap for the river-crossing family: n(b + 1).
TimeIndex mc_horizon_cap(int n, int b);

}  // namespace stcsp
