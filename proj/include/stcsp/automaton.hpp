#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcsp/core_model.hpp"

namespace stcsp {

using StateId = std::uint32_t;

struct Transition {
    InstantaneousAssignment label;
    StateId to = 0;
    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Deterministic Buchi automaton. Labels carry the full variable tuple
/// (user variables and auxiliaries); projection happens on display.
struct BuchiAutomaton {
    std::vector<VarInfo> vars;  // label schema
    std::optional<StateId> initial;
    std::vector<bool> accepting;
    std::vector<std::vector<Transition>> transitions;

    [[nodiscard]] std::size_t state_count() const { return accepting.size(); }
    [[nodiscard]] bool empty() const { return !initial.has_value(); }
    [[nodiscard]] std::size_t transition_count() const;
    [[nodiscard]] std::size_t accepting_count() const;

    StateId add_state(bool is_accepting);
    void add_transition(StateId from, InstantaneousAssignment label, StateId to);
    [[nodiscard]] std::optional<StateId> step(StateId from, const InstantaneousAssignment& label) const;

    /// Label positions of user-declared variables.
    [[nodiscard]] std::vector<std::uint32_t> user_positions() const;

    friend bool operator==(const BuchiAutomaton&, const BuchiAutomaton&) = default;
};

struct Run {
    StateId start = 0;
    std::vector<InstantaneousAssignment> labels;
    std::vector<StateId> visited;
};

struct InvalidRun : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrefixCapExceeded : std::runtime_error {
    std::uint64_t bound;
    PrefixCapExceeded(std::uint64_t bound_, std::uint64_t cap);
};

/// States reachable from the initial state that can reach a cycle through an
/// accepting state. An accepting dead end is not live.
std::vector<bool> live_states(const BuchiAutomaton& a);

/// Keeps exactly the live states.
/// Surviving states keep their relative order.
BuchiAutomaton prune(const BuchiAutomaton& a);

/// Label sequences of length L along runs from the initial state, projected
/// onto `positions` (all positions when nullopt).
std::set<StreamPrefix> enumerate_prefixes(const BuchiAutomaton& a, std::size_t L,
                                          const std::optional<std::vector<std::uint32_t>>& positions = std::nullopt,
                                          std::uint64_t cap = 1'000'000);

Run run(const BuchiAutomaton& a, const std::vector<InstantaneousAssignment>& labels);

/// stem then cycle repeated forever; throws InvalidRun on a missing transition.
bool accepts_lasso(const BuchiAutomaton& a, const std::vector<InstantaneousAssignment>& stem,
                   const std::vector<InstantaneousAssignment>& cycle);

/// Fewest transitions from the initial state to a state satisfying `target`.
template <class Pred>
std::optional<std::size_t> bfs_distance(const BuchiAutomaton& a, Pred&& target);

std::optional<std::size_t> distance_to_accepting(const BuchiAutomaton& a);

/// Compares the projected prefix languages of a and b up to `depth`.
/// Returns a shortest projected prefix present in one but not the other.
std::optional<StreamPrefix> first_projected_difference(const BuchiAutomaton& a, const std::vector<std::uint32_t>& pa,
                                                       const BuchiAutomaton& b, const std::vector<std::uint32_t>& pb,
                                                       std::size_t depth);

std::string export_dot(const BuchiAutomaton& a, const std::optional<std::vector<std::uint32_t>>& positions = std::nullopt);
std::string export_json(const BuchiAutomaton& a);
BuchiAutomaton automaton_from_json(const std::string& text);

// ---------------------------------------------------------------------------

template <class Pred>
std::optional<std::size_t> bfs_distance(const BuchiAutomaton& a, Pred&& target) {
    if (a.empty()) return std::nullopt;
    std::vector<std::size_t> dist(a.state_count(), SIZE_MAX);
    std::vector<StateId> queue{*a.initial};
    dist[*a.initial] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        StateId s = queue[head];
        if (target(s)) return dist[s];
        for (const auto& t : a.transitions[s]) {
            if (dist[t.to] == SIZE_MAX) {
                dist[t.to] = dist[s] + 1;
                queue.push_back(t.to);
            }
        }
    }
    return std::nullopt;
}

}  // namespace stcsp
