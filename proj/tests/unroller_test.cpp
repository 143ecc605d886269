#include <gtest/gtest.h>

#include "corpus.hpp"
#include "stcsp/eval.hpp"
#include "stcsp/parser.hpp"
#include "stcsp/unroller.hpp"

using namespace stcsp;

namespace {

StCsp model(const std::string& text) { return parse_or_throw({text, "<test>"}); }

const char* kFirstThenOne = "var x with alphabet [0..1]; first x == 0; 1 until (x eq 1);";

bool untils_hold(const StCsp& p, const StreamPrefix& pre) {
    for (const auto& c : p.constraints()) {
        PrefixStatus s = check_prefix(c, pre);
        if (s.kind == PrefixStatus::Kind::Violated) return false;
        if (c.kind == ConstraintKind::Until && s.kind != PrefixStatus::Kind::FinallySatisfied) return false;
    }
    return true;
}

}  // namespace

TEST(Unroll, PointwiseExample) {
    FdCsp c = unroll(model("var x with alphabet [0..1]; x == 0;"), 2);
    ASSERT_EQ(c.vars.size(), 2u);
    EXPECT_EQ(c.vars[0].time, 0);
    EXPECT_EQ(c.vars[1].time, 1);
    EXPECT_EQ(c.vars[1].alphabet, Alphabet(0, 1));
    ASSERT_EQ(c.constraints.size(), 2u);
    EXPECT_EQ(c.constraints[0].scope, std::vector<std::uint32_t>{0});
    EXPECT_EQ(c.constraints[1].scope, std::vector<std::uint32_t>{1});
}

TEST(Unroll, UntilBecomesDisjunction) {
    FdCsp c = unroll(model("var x with alphabet [0..1]; 1 until (x eq 1);"), 2);
    ASSERT_EQ(c.constraints.size(), 1u);
    EXPECT_EQ(c.constraints[0].kind, FdConstraint::Kind::Eventually);
    EXPECT_EQ(c.constraints[0].options, (std::vector<TimeIndex>{0, 1}));
    HorizonResult all = fd_solve(c, FdMode::All);
    // (x0 = 1) or (x1 = 1)
    EXPECT_EQ(all.solution_count, 3u);
}

TEST(Unroll, AtBeyondHorizon) {
    FdCsp c = unroll(model("var x with alphabet [0..1]; (x @ 3) == 1;"), 2);
    EXPECT_TRUE(c.unsat_by_construction);
    EXPECT_EQ(fd_solve(c).outcome, HorizonResult::Outcome::Unsat);
    EXPECT_FALSE(unroll(model("var x with alphabet [0..1]; (x @ 3) == 1;"), 4).unsat_by_construction);
}

TEST(Unroll, BoundaryIsOptimistic) {
    // next x at the last step reads past the horizon, so it is dropped there
    FdCsp c = unroll(model("var x with alphabet [0..1]; next x == 1 - x;"), 3);
    EXPECT_EQ(c.constraints.size(), 2u);
    EXPECT_EQ(fd_solve(c, FdMode::Count).solution_count, 2u);
}

TEST(FdSolve, Examples) {
    HorizonResult r = fd_solve(unroll(model("var x with alphabet [0..1]; x == 0;"), 2));
    ASSERT_EQ(r.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(*r.assignment, (StreamPrefix{{{0}, {0}}}));

    EXPECT_EQ(fd_solve(unroll(model("var x with alphabet [0..1]; 1 until (x eq 1); x <= 0;"), 3)).outcome,
              HorizonResult::Outcome::Unsat);

    HorizonResult f = fd_solve(unroll(model(kFirstThenOne), 2));
    ASSERT_EQ(f.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(*f.assignment, (StreamPrefix{{{0}, {1}}}));
}

TEST(FdSolve, ModesAgree) {
    for (const auto& m : corpus::random_models(40, 31)) {
        FdCsp c = unroll(corpus::parse(m), 3);
        HorizonResult all = fd_solve(c, FdMode::All);
        HorizonResult count = fd_solve(c, FdMode::Count);
        HorizonResult first = fd_solve(c, FdMode::First);
        EXPECT_EQ(all.solutions.size(), all.solution_count) << m.text;
        EXPECT_EQ(count.solution_count, all.solution_count) << m.text;
        EXPECT_EQ(first.outcome == HorizonResult::Outcome::Sat, all.solution_count > 0) << m.text;
        if (first.assignment && !all.solutions.empty()) {
            EXPECT_EQ(*first.assignment, all.solutions.front()) << m.text;
        }
        EXPECT_TRUE(std::is_sorted(all.solutions.begin(), all.solutions.end())) << m.text;
    }
}

TEST(FdSolve, Budget) {
    StCsp p = model("var x, y with alphabet [0..5]; x + y >= 0;");
    EXPECT_EQ(fd_solve(unroll(p, 6), FdMode::Count, 100).outcome, HorizonResult::Outcome::BudgetExceeded);
}

// sat assignments violate nothing and discharge every until
TEST(FdSolve, Soundness) {
    for (const auto& m : corpus::random_models(80, 32)) {
        StCsp p = corpus::parse(m);
        for (TimeIndex T = 1; T <= 4; ++T) {
            HorizonResult r = fd_solve(unroll(p, T), FdMode::All);
            for (const auto& s : r.solutions) {
                ASSERT_EQ(s.steps.size(), static_cast<std::size_t>(T));
                EXPECT_TRUE(untils_hold(p, s)) << m.text;
            }
        }
    }
}

// the solver finds every prefix the brute force accepts
TEST(FdSolve, CompleteOnPointwiseModels) {
    StCsp p = model("var x, y with alphabet [0..2]; x + y == 2; x -> y; next x != x;");
    std::set<StreamPrefix> want;
    for (const auto& pre : corpus::all_prefixes({{0, 2}, {0, 2}}, 3)) {
        if (untils_hold(p, pre)) want.insert(pre);
    }
    HorizonResult r = fd_solve(unroll(p, 3), FdMode::All);
    EXPECT_EQ(std::set<StreamPrefix>(r.solutions.begin(), r.solutions.end()), want);
}

TEST(IncrementUntilSat, Examples) {
    HorizonResult a = increment_until_sat(model(kFirstThenOne), 10);
    EXPECT_EQ(a.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(a.horizon, 2);

    HorizonResult b = increment_until_sat(model("var x with alphabet [0..1]; 1 until (x eq 1);"), 10);
    EXPECT_EQ(b.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(b.horizon, 1);

    HorizonResult c = increment_until_sat(model("var x with alphabet [0..1]; x <= 0; 1 until (x eq 1);"), 5);
    EXPECT_EQ(c.outcome, HorizonResult::Outcome::Unsat);
    EXPECT_EQ(c.horizon, 5);
}

TEST(IncrementUntilSat, AtPin) {
    HorizonResult r = increment_until_sat(model("var x with alphabet [0..1]; (x @ 3) == 1;"), 10);
    EXPECT_EQ(r.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(r.horizon, 4);
}

TEST(IncrementUntilSat, MatchesMcPlan) {
    HorizonResult r = increment_until_sat(parse_or_throw(gen_mc({3, 2, Variant::until()})), 20);
    ASSERT_EQ(r.outcome, HorizonResult::Outcome::Sat);
    EXPECT_EQ(r.horizon, *corpus::mc_shortest_plan(3, 2) + 1);
}

TEST(McHorizonCap, Formula) {
    EXPECT_EQ(mc_horizon_cap(3, 2), 9);
    EXPECT_EQ(mc_horizon_cap(5, 3), 20);
}
