#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "stcsp/core_model.hpp"
#include "stcsp/eval.hpp"

namespace stcsp::oracle {

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No closed exploration graph was found within the horizon.
struct Inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Projection = std::optional<std::vector<std::uint32_t>>;

struct PrefixClass {
    StreamPrefix prefix;
    std::vector<PrefixStatus> status;  // one per constraint, in model order
};

PrefixClass classify(const StCsp& p, const StreamPrefix& prefix);

/// Every length-L prefix over the full variable tuple that violates no
/// constraint, projected. Over-approximates the solution prefixes.
std::set<StreamPrefix> enumerate(const StCsp& p, std::size_t L, const Projection& project = std::nullopt,
                                 std::uint64_t cap = 1'000'000);

/// The length-L prefixes that extend to an infinite solution. Exploration
/// merges long prefixes whose futures provably coincide (same recent window,
/// same absolute reads, same until statuses) and looks for cycles in the
/// resulting finite graph; it gives up past depth H.
std::set<StreamPrefix> solution_prefixes(const StCsp& p, std::size_t L, std::size_t H,
                                         const Projection& project = std::nullopt, std::uint64_t cap = 1'000'000);

/// Horizon large enough for models whose merged graph closes quickly.
std::size_t default_horizon(const StCsp& p, std::size_t L);

}  // namespace stcsp::oracle
