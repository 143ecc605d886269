#include <gtest/gtest.h>

#include <atomic>
#include <map>
#include <set>

#include "corpus.hpp"
#include "stcsp/automaton.hpp"
#include "stcsp/benchgen.hpp"
#include "stcsp/normalizer.hpp"
#include "stcsp/oracle.hpp"
#include "stcsp/parser.hpp"
#include "stcsp/solver.hpp"

using namespace stcsp;

namespace {

NormalForm nf_of(const std::string& text) { return normalize(parse_or_throw({text, "<test>"})).normal; }

Expr v(std::uint32_t i) { return Expr::var(VarId{i}); }

NormalForm bare(std::vector<Alphabet> alphabets) {
    NormalForm nf;
    for (std::size_t i = 0; i < alphabets.size(); ++i) nf.vars.add_var("v" + std::to_string(i), alphabets[i]);
    return nf;
}

}  // namespace

TEST(Feasible, PointwiseOnly) {
    NormalForm nf = nf_of("var x with alphabet [0..1]; x == 0;");
    auto taus = feasible_assignments(nf, root_node(nf));
    ASSERT_EQ(taus.size(), 1u);
    EXPECT_EQ(taus[0], (InstantaneousAssignment{0}));
}

TEST(Feasible, HistoricPin) {
    NormalForm nf = bare({{0, 1}});
    nf.next_pairs.push_back({VarId{0}, VarId{0}});
    SearchNode n = root_node(nf);
    n.historic = {{VarId{0}, 1}};
    auto taus = feasible_assignments(nf, n);
    ASSERT_EQ(taus.size(), 1u);
    EXPECT_EQ(taus[0], (InstantaneousAssignment{1}));
}

// brute force over the alphabet product, keeping tuples that satisfy every
// pointwise constraint and the until filter
TEST(Feasible, UntilRootMatchesBruteForce) {
    NormalForm nf = nf_of("var x with alphabet [0..1]; 1 until (x eq 1);");
    std::vector<Alphabet> alph;
    for (const auto& var : nf.vars.vars()) alph.push_back(var.alphabet);
    std::vector<InstantaneousAssignment> expected;
    for (const auto& p : corpus::all_prefixes(alph, 1)) {
        const auto& tau = p.steps[0];
        bool ok = true;
        for (const auto& c : nf.pointwise) ok = ok && check_prefix(c, p).kind != PrefixStatus::Kind::Violated;
        for (const auto& u : nf.until_pairs) ok = ok && (tau[u.lhs.index] != 0 || tau[u.rhs.index] != 0);
        if (ok) expected.push_back(tau);
    }
    EXPECT_EQ(feasible_assignments(nf, root_node(nf)), expected);
    EXPECT_EQ(expected.size(), 2u);
}

TEST(Feasible, LexicographicOrder) {
    NormalForm nf = nf_of("var x, y with alphabet [0..2]; x + y <= 2; next y != x;");
    auto taus = feasible_assignments(nf, root_node(nf));
    EXPECT_TRUE(std::is_sorted(taus.begin(), taus.end()));
    EXPECT_EQ(std::adjacent_find(taus.begin(), taus.end()), taus.end());
}

TEST(Construct, DropsDischargedUntil) {
    NormalForm nf = bare({{0, 1}, {0, 1}});
    nf.until_pairs.push_back({VarId{0}, VarId{1}});
    SearchNode n = root_node(nf);
    EXPECT_TRUE(construct(nf, n, {1, 1}).until_pairs.empty());
    EXPECT_EQ(construct(nf, n, {1, 0}).until_pairs.size(), 1u);
}

TEST(Construct, AtTriplesCountDown) {
    NormalForm nf = bare({{0, 1}, {0, 1}});
    nf.at_triples.push_back({VarId{0}, VarId{1}, 3});
    SearchNode child = construct(nf, root_node(nf), {1, 0});
    ASSERT_EQ(child.at_triples.size(), 1u);
    EXPECT_EQ(child.at_triples[0].time, 2);
    // the alias of a constant stream keeps its value
    EXPECT_NE(std::find(child.pointwise.begin(), child.pointwise.end(),
                        Constraint::relation(v(0), Op::Eq, Expr::constant(1))),
              child.pointwise.end());

    nf.at_triples[0].time = 1;
    SearchNode last = construct(nf, root_node(nf), {0, 0});
    EXPECT_TRUE(last.at_triples.empty());
    EXPECT_NE(std::find(last.pointwise.begin(), last.pointwise.end(),
                        Constraint::relation(v(0), Op::Eq, Expr::unary(Op::First, v(1)))),
              last.pointwise.end());
}

TEST(Construct, FirstTautologyDropped) {
    NormalForm nf = nf_of("var x with alphabet [0..1]; first x == 0;");
    SearchNode child = construct(nf, root_node(nf), {0});
    EXPECT_TRUE(child.pointwise.empty());
}

TEST(Construct, HistoricFromNextPairs) {
    NormalForm nf = nf_of("var x with alphabet [0..1]; x == next x;");
    ASSERT_EQ(nf.next_pairs.size(), 1u);
    SearchNode root = root_node(nf);
    for (const auto& tau : feasible_assignments(nf, root)) {
        SearchNode child = construct(nf, root, tau);
        ASSERT_EQ(child.historic.size(), 1u);
        EXPECT_EQ(child.historic[0].first, nf.next_pairs[0].rhs);
        EXPECT_EQ(child.historic[0].second, tau[nf.next_pairs[0].lhs.index]);
    }
}

TEST(AreEqual, Canonicalization) {
    NormalForm nf = nf_of("var x, y with alphabet [0..1]; x <= y; x != 1 - y; next x == y;");
    SearchNode a = root_node(nf);
    EXPECT_TRUE(are_equal(a, a));
    SearchNode b = a;
    std::reverse(b.pointwise.begin(), b.pointwise.end());
    EXPECT_TRUE(are_equal(a, canonicalize(b)));
    SearchNode c = a, d = a;
    c.historic = {{VarId{0}, 0}};
    d.historic = {{VarId{0}, 1}};
    EXPECT_FALSE(are_equal(c, d));
}

TEST(Solve, UntilExample) {
    SolveResult r = solve(nf_of("var x with alphabet [0..1]; 1 until (x eq 1);"));
    BuchiAutomaton a = prune(r.automaton);
    ASSERT_EQ(a.state_count(), 2u);
    StateId pending = *a.initial;
    EXPECT_FALSE(a.accepting[pending]);
    auto ux = a.user_positions();
    auto x_of = [&](const Transition& t) { return t.label[ux[0]]; };
    StateId done = pending;
    for (const auto& t : a.transitions[pending]) {
        if (x_of(t) == 0) EXPECT_EQ(t.to, pending);
        else done = t.to;
    }
    ASSERT_NE(done, pending);
    EXPECT_TRUE(a.accepting[done]);
    std::set<Value> loops;
    for (const auto& t : a.transitions[done]) {
        EXPECT_EQ(t.to, done);
        loops.insert(x_of(t));
    }
    EXPECT_EQ(loops, (std::set<Value>{0, 1}));
}

TEST(Solve, ConstantStreams) {
    SolveResult r = solve(nf_of("var x with alphabet [0..1]; x == next x;"));
    BuchiAutomaton a = prune(r.automaton);
    EXPECT_EQ(a.state_count(), 3u);
    EXPECT_EQ(a.accepting_count(), 3u);
    auto prefixes = enumerate_prefixes(a, 4, a.user_positions());
    std::set<StreamPrefix> expected{StreamPrefix{{{0}, {0}, {0}, {0}}}, StreamPrefix{{{1}, {1}, {1}, {1}}}};
    EXPECT_EQ(prefixes, expected);
}

TEST(Solve, ContradictionPrunesToEmpty) {
    SolveResult r = solve(nf_of("var x with alphabet [0..1]; x <= 0; 1 until (x eq 1);"));
    EXPECT_TRUE(prune(r.automaton).empty());
}

TEST(Solve, StatsAreConsistent) {
    SolveResult r = solve(normalize(parse_or_throw(gen_mc({3, 2, Variant::until()}))).normal);
    EXPECT_EQ(r.stats.states_emitted, r.automaton.state_count());
    EXPECT_EQ(r.stats.nodes_expanded, r.stats.states_emitted + r.stats.dominance_hits);
    EXPECT_EQ(r.facts.size(), r.automaton.state_count());
    for (StateId s = 0; s < r.automaton.state_count(); ++s) {
        EXPECT_EQ(r.automaton.accepting[s], r.facts[s].until_count == 0);
    }
}

TEST(Solve, BudgetsAndCancellation) {
    NormalForm nf = normalize(parse_or_throw(gen_mc({3, 2, Variant::until()}))).normal;
    SolveOptions tight;
    tight.node_budget = 5;
    EXPECT_THROW(solve(nf, tight), BudgetExceeded);
    SolveOptions shallow;
    shallow.depth_budget = 3;
    EXPECT_THROW(solve(nf, shallow), BudgetExceeded);
    std::atomic<bool> stop{true};
    SolveOptions cancelled;
    cancelled.cancel = &stop;
    EXPECT_THROW(solve(nf, cancelled), SolveInterrupted);
    SolveOptions late;
    late.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    EXPECT_THROW(solve(nf, late), SolveInterrupted);
}

// deterministic, accepting states stay accepting, and node counts respect
// the bound (distinct constraint sets) x (historic value tuples)
TEST(SolveProperties, AutomatonShape) {
    for (const auto& m : corpus::random_models(120, 21)) {
        NormalForm nf = normalize(corpus::parse(m)).normal;
        SolveResult r = solve(nf);
        const BuchiAutomaton& a = r.automaton;
        for (StateId s = 0; s < a.state_count(); ++s) {
            std::set<InstantaneousAssignment> labels;
            for (const auto& t : a.transitions[s]) {
                EXPECT_TRUE(labels.insert(t.label).second) << m.text;
                if (a.accepting[s]) EXPECT_TRUE(a.accepting[t.to]) << m.text;
            }
        }
        std::uint64_t pins = 1;
        std::set<std::uint32_t> pinned;
        for (const auto& np : nf.next_pairs) pinned.insert(np.rhs.index);
        for (std::uint32_t i : pinned) pins *= nf.vars.vars()[i].alphabet.size() + 1;
        std::uint64_t sets = 1ULL << std::min<std::size_t>(nf.until_pairs.size() + nf.pointwise.size() + 3, 40);
        EXPECT_LE(a.state_count(), pins * sets * 8) << m.text;
    }
}

// a child node accepts exactly the tails, after tau, of its parent's solutions
TEST(SolveProperties, DominanceSoundness) {
    std::size_t checked = 0;
    for (const auto& m : corpus::random_models(60, 33)) {
        NormalForm nf = normalize(corpus::parse(m)).normal;
        SearchNode root = root_node(nf);
        StCsp parent = node_to_stcsp(nf, root);
        std::set<StreamPrefix> parent_prefixes;
        try {
            parent_prefixes = oracle::solution_prefixes(parent, 3, oracle::default_horizon(parent, 3), std::nullopt, UINT64_MAX);
        } catch (const oracle::Inconclusive&) {
            continue;
        }
        for (const auto& tau : feasible_assignments(nf, root)) {
            SearchNode child = construct(nf, root, tau);
            StCsp shifted = node_to_stcsp(nf, child);
            auto child_prefixes = oracle::solution_prefixes(shifted, 2, oracle::default_horizon(shifted, 2), std::nullopt, UINT64_MAX);
            std::set<StreamPrefix> tails;
            for (const auto& p : parent_prefixes) {
                if (p.steps[0] != tau) continue;
                tails.insert(StreamPrefix{{p.steps.begin() + 1, p.steps.end()}});
            }
            EXPECT_EQ(child_prefixes, tails) << m.text;
            ++checked;
        }
    }
    EXPECT_GT(checked, 50u);
}

TEST(Solve, TerminatesOnGeneratedInstances) {
    for (int n = 1; n <= 4; ++n) {
        SolveOptions o;
        o.node_budget = 1'000'000;
        EXPECT_NO_THROW(solve(normalize(parse_or_throw(gen_mc({n, 2, Variant::until()}))).normal, o));
        EXPECT_NO_THROW(solve(normalize(parse_or_throw(gen_grid(GridParams{n, 0.7, 3, std::nullopt, std::nullopt, Variant::until()}))).normal, o));
    }
}
