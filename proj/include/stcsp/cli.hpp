#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stcsp/benchgen.hpp"
#include "stcsp/solver.hpp"

namespace stcsp::cli {

/// Exit codes of `solve`: 0 satisfiable, 1 unsatisfiable, 2 error.
/// `verify` uses 0 PASS, 1 FAIL, 2 error, 3 SKIPPED.
enum Exit : int { Sat = 0, Unsat = 1, Error = 2, Skipped = 3 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchInstance {
    std::string id;
    std::string family;  // "mc" or "grid"
    McParams mc;
    GridParams grid;
};

struct RunReport {
    std::string id;
    std::string outcome;  // sat, unsat, timeout, error
    SolveStats stats;
    std::size_t states_before = 0;
    std::size_t states_after = 0;
    std::size_t accepting = 0;
    std::optional<std::size_t> shortest_accepting_prefix;
    std::string message;
};

inline constexpr const char* kCsvSchema = "stcsp-bench/1";

std::vector<BenchInstance> parse_suite(const std::string& json_text);
RunReport run_instance(const BenchInstance& inst, double timeout_seconds, std::uint64_t node_budget);
std::string csv_header();
std::string csv_row(const BenchInstance& inst, const RunReport& r);

/// Prefix rendering used by `--enumerate`: steps run together when every
/// value is a single digit, otherwise separated by spaces; a step with several
/// variables prints as (a,b).
std::string format_prefix(const StreamPrefix& p, bool compact);
bool compact_values(const std::vector<StreamPrefix>& ps);

/// max(d - 1, 0) for the BFS distance d to the nearest accepting state.
std::optional<std::size_t> shortest_accepting_prefix(const BuchiAutomaton& pruned);

}  // namespace stcsp::cli
