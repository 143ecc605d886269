#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stcsp/automaton.hpp"
#include "stcsp/normalizer.hpp"

namespace stcsp {

/// Syntactic shifted view: primitive constraints plus the historic table h.
struct SearchNode {
    std::vector<Constraint> pointwise;  // sorted by canonical_key, no duplicates
    std::vector<NextPair> next_pairs;
    std::vector<UntilPair> until_pairs;  // sorted
    std::vector<AtTriple> at_triples;    // sorted
    std::vector<std::pair<VarId, Value>> historic;  // sorted by variable; empty at the root

    friend bool operator==(const SearchNode&, const SearchNode&) = default;
};

/// Byte string identifying a constraint up to structure; variables by index.
std::string canonical_key(const Constraint& c);

/// Sorts and deduplicates every component of n.
SearchNode canonicalize(SearchNode n);

SearchNode root_node(const NormalForm& p);

/// All instantaneous assignments consistent with n at the current instant,
/// in lexicographic order (variable index order, values ascending).
std::vector<InstantaneousAssignment> feasible_assignments(const NormalForm& p, const SearchNode& n);

SearchNode construct(const NormalForm& p, const SearchNode& n, const InstantaneousAssignment& tau);

bool are_equal(const SearchNode& a, const SearchNode& b);

/// The node read as a St-CSP: its constraints plus `first xj == h(xj)` pins.
StCsp node_to_stcsp(const NormalForm& p, const SearchNode& n);

struct SolveStats {
    std::uint64_t nodes_expanded = 0;
    std::uint64_t dominance_hits = 0;
    std::uint64_t failures = 0;
    std::uint64_t states_emitted = 0;
    double wall_time = 0.0;  // seconds
};

/// Per-state facts recorded while solving, indexed like the automaton states.
struct StateFacts {
    std::uint32_t until_count = 0;
    std::uint32_t at_count = 0;
    bool first_pending = false;  // some pointwise constraint still mentions first

    [[nodiscard]] bool settled() const { return until_count == 0 && at_count == 0 && !first_pending; }
};

struct SolveOptions {
    std::uint64_t node_budget = 10'000'000;
    std::uint64_t depth_budget = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    const std::atomic<bool>* cancel = nullptr;
};

struct SolveResult {
    BuchiAutomaton automaton;  // unpruned
    std::vector<StateFacts> facts;
    SolveStats stats;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveInterrupted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SolveResult solve(const NormalForm& p, const SolveOptions& options = {});

}  // namespace stcsp
