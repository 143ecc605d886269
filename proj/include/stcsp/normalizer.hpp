#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stcsp/core_model.hpp"

namespace stcsp {

/// xi == next xj
struct NextPair {
    VarId lhs;
    VarId rhs;
    friend auto operator<=>(const NextPair&, const NextPair&) = default;
};

/// xi until xj
struct UntilPair {
    VarId lhs;
    VarId rhs;
    friend auto operator<=>(const UntilPair&, const UntilPair&) = default;
};

/// xi == xj @ t, t >= 1
struct AtTriple {
    VarId lhs;
    VarId rhs;
    Value time = 1;
    friend auto operator<=>(const AtTriple&, const AtTriple&) = default;
};

/// A St-CSP in normal form. `vars` holds the original variables followed by
/// auxiliaries in creation order; `pointwise` is free of next/fby/until/@.
struct NormalForm {
    StCsp vars;  // variable table only; its constraint list stays empty
    std::vector<NextPair> next_pairs;
    std::vector<UntilPair> until_pairs;
    std::vector<AtTriple> at_triples;
    std::vector<Constraint> pointwise;

    /// Re-expresses the normal form as an ordinary St-CSP (primitive
    /// constraints written out), e.g. for the oracle or `--dump-normal`.
    [[nodiscard]] StCsp to_stcsp() const;
};

struct RewriteStep {
    std::string rule;  // "next", "next-shared", "fby", "until", "at"
    Constraint consumed;
    std::vector<Constraint> produced;    // returned to the not-yet-normal set
    std::vector<Constraint> normalized;  // moved to the normal set
    std::vector<VarId> fresh;
};

using RewriteTrace = std::vector<RewriteStep>;

struct RewriteStrategy {
    enum class Kind { InnermostLeftmost, Random };
    Kind kind = Kind::InnermostLeftmost;
    std::uint64_t seed = 0;

    static RewriteStrategy innermost_leftmost() { return {}; }
    static RewriteStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

struct NormalizeResult {
    NormalForm normal;
    RewriteTrace trace;
};

NormalizeResult normalize(const StCsp& p, RewriteStrategy strategy = RewriteStrategy::innermost_leftmost());

/// Number of next/fby/until/@ keywords in a constraint set.
std::size_t count_temporal_keywords(const std::vector<Constraint>& cs);

/// Smallest interval containing every value e can take given the variables'
/// alphabets. Pseudo-Boolean operators give [0..1].
Alphabet value_range(const Expr& e, const StCsp& vars);

/// True iff some bijective renaming of auxiliary variables maps a onto b.
bool alpha_equivalent(const NormalForm& a, const NormalForm& b);

}  // namespace stcsp
