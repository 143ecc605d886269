#include <gtest/gtest.h>

#include "corpus.hpp"
#include "stcsp/core_model.hpp"
#include "stcsp/eval.hpp"
#include "stcsp/parser.hpp"

using namespace stcsp;

namespace {

StreamPrefix prefix_of(std::initializer_list<InstantaneousAssignment> steps) { return StreamPrefix{steps}; }

Expr x() { return Expr::var(VarId{0}); }
Expr y() { return Expr::var(VarId{1}); }

}  // namespace

TEST(Alphabet, RejectsInvertedBounds) {
    EXPECT_THROW(Alphabet(2, 1), std::invalid_argument);
    EXPECT_EQ(Alphabet(0, 2).size(), 3u);
    EXPECT_TRUE(Alphabet(-1, 1).contains(-1));
    EXPECT_FALSE(Alphabet(-1, 1).contains(2));
}

TEST(StCsp, AuxiliariesAreMarked) {
    StCsp p;
    VarId a = p.add_var("a", {0, 1});
    VarId aux = p.add_aux_var({0, 3});
    EXPECT_EQ(p.var(a).origin, VarOrigin::User);
    EXPECT_EQ(p.var(aux).origin, VarOrigin::Auxiliary);
    EXPECT_EQ(p.aux_count(), 1u);
    ASSERT_EQ(p.user_vars().size(), 1u);
    EXPECT_EQ(p.find("a")->index, 0u);
    EXPECT_FALSE(p.find("zz"));
}

TEST(EvalGround, SpecExamples) {
    EXPECT_EQ(eval_ground(Expr::constant(2), prefix_of({{0}}), 5).value, 2);

    EvalResult head = eval_ground(Expr::binary(Op::Fby, Expr::constant(1), x()), prefix_of({{0}}), 0);
    ASSERT_TRUE(head.determined());
    EXPECT_EQ(head.value, 1);

    EvalResult at = eval_ground(Expr::at(x(), 2), prefix_of({{0}, {0}, {1}}), 0);
    ASSERT_TRUE(at.determined());
    EXPECT_EQ(at.value, 1);

    EXPECT_TRUE(eval_ground(Expr::binary(Op::Div, Expr::constant(1), x()), prefix_of({{0}}), 0).is_error());
}

TEST(EvalGround, TemporalShifts) {
    StreamPrefix p = prefix_of({{1}, {2}, {3}});
    EXPECT_EQ(eval_ground(Expr::unary(Op::Next, x()), p, 1).value, 3);
    EXPECT_FALSE(eval_ground(Expr::unary(Op::Next, x()), p, 2).determined());
    EXPECT_EQ(eval_ground(Expr::unary(Op::First, x()), p, 2).value, 1);
    EXPECT_EQ(eval_ground(Expr::binary(Op::Fby, Expr::constant(9), x()), p, 2).value, 2);
    EXPECT_EQ(eval_ground(Expr::at(x(), 1), p, 0).value, 2);
    EXPECT_FALSE(eval_ground(Expr::at(x(), 3), p, 0).determined());
}

TEST(EvalGround, CConventionBooleans) {
    StreamPrefix p = prefix_of({{3, 0}});
    EXPECT_EQ(eval_ground(Expr::binary(Op::And, x(), y()), p, 0).value, 0);
    EXPECT_EQ(eval_ground(Expr::binary(Op::Or, x(), y()), p, 0).value, 1);
    EXPECT_EQ(eval_ground(Expr::unary(Op::Not, x()), p, 0).value, 0);
    EXPECT_EQ(eval_ground(Expr::ite(x(), Expr::constant(7), Expr::constant(8)), p, 0).value, 7);
    // short circuit keeps the error branch unevaluated
    Expr boom = Expr::binary(Op::Div, Expr::constant(1), y());
    EXPECT_EQ(eval_ground(Expr::binary(Op::Or, x(), boom), p, 0).value, 1);
    EXPECT_TRUE(eval_ground(Expr::binary(Op::And, x(), boom), p, 0).is_error());
}

TEST(EvalGround, OverflowIsAnError) {
    StreamPrefix p = prefix_of({{INT64_MAX}});
    EXPECT_TRUE(eval_ground(Expr::binary(Op::Add, x(), Expr::constant(1)), p, 0).is_error());
    EXPECT_TRUE(eval_ground(Expr::binary(Op::Mod, x(), Expr::constant(0)), p, 0).is_error());
}

TEST(CheckPrefix, SpecExamples) {
    Constraint eq0 = Constraint::relation(x(), Op::Eq, Expr::constant(0));
    EXPECT_EQ(check_prefix(eq0, prefix_of({{0}, {0}})), PrefixStatus::consistent());
    EXPECT_EQ(check_prefix(eq0, prefix_of({{0}, {1}})).kind, PrefixStatus::Kind::Violated);

    Constraint u = Constraint::until(Expr::constant(1), Expr::binary(Op::Eq, x(), Expr::constant(1)));
    EXPECT_EQ(check_prefix(u, prefix_of({{0}, {1}})), PrefixStatus::satisfied(1));

    Constraint v = Constraint::until(Expr::binary(Op::Eq, x(), Expr::constant(0)), Expr::binary(Op::Eq, y(), Expr::constant(1)));
    EXPECT_EQ(check_prefix(v, prefix_of({{1, 0}})).kind, PrefixStatus::Kind::Violated);
}

// the until definition applied by hand to every 2-step prefix over {0,1}^2
TEST(CheckPrefix, UntilAgainstDefinition) {
    Constraint v = Constraint::until(Expr::binary(Op::Eq, x(), Expr::constant(0)), Expr::binary(Op::Eq, y(), Expr::constant(1)));
    for (const auto& p : corpus::all_prefixes({{0, 1}, {0, 1}}, 2)) {
        const auto& s0 = p.steps[0];
        const auto& s1 = p.steps[1];
        PrefixStatus want = PrefixStatus::consistent();
        if (s0[1] == 1) want = PrefixStatus::satisfied(0);
        else if (s0[0] != 0) want = PrefixStatus::violated(0);
        else if (s1[1] == 1) want = PrefixStatus::satisfied(1);
        else if (s1[0] != 0) want = PrefixStatus::violated(1);
        EXPECT_EQ(check_prefix(v, p), want);
    }
}

TEST(CheckPrefix, ImplicationIsPointwise) {
    Constraint c = Constraint::implies(x(), y());
    EXPECT_EQ(check_prefix(c, prefix_of({{0, 0}, {1, 1}})), PrefixStatus::consistent());
    EXPECT_EQ(check_prefix(c, prefix_of({{0, 0}, {1, 0}})), PrefixStatus::violated(1));
}

// determined values and verdicts survive every extension of the prefix
TEST(EvalProperties, MonotoneUnderExtension) {
    for (const auto& m : corpus::random_models(60, 11)) {
        StCsp p = corpus::parse(m);
        std::vector<Alphabet> alph;
        for (const auto& v : p.vars()) alph.push_back(v.alphabet);
        auto longer = corpus::all_prefixes(alph, 3);
        for (const auto& full : longer) {
            StreamPrefix shorter{{full.steps.begin(), full.steps.begin() + 2}};
            for (const auto& c : p.constraints()) {
                PrefixStatus a = check_prefix(c, shorter);
                PrefixStatus b = check_prefix(c, full);
                if (a.kind != PrefixStatus::Kind::ConsistentSoFar) EXPECT_EQ(a, b) << m.text;
                for (TimeIndex t = 0; t < 3; ++t) {
                    EvalResult r = eval_ground(c.lhs, shorter, t);
                    if (r.determined()) EXPECT_EQ(eval_ground(c.lhs, full, t).value, r.value) << m.text;
                }
            }
        }
    }
}

TEST(Expr, DesugarAt) {
    Expr e = desugar_at(Expr::at(x(), 2));
    EXPECT_EQ(e, Expr::unary(Op::First, Expr::unary(Op::Next, Expr::unary(Op::Next, x()))));
    EXPECT_EQ(count_temporal(Expr::at(x(), 2)), 1u);
    EXPECT_TRUE(contains_op(e, Op::Next));
    EXPECT_FALSE(contains_op(e, Op::At));
}

TEST(ReadWindow, Shapes) {
    Expr e = Expr::binary(Op::Add, Expr::unary(Op::Next, x()), Expr::binary(Op::Fby, Expr::constant(0), y()));
    auto w = relative_window(e);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->max_offset, 1);
    EXPECT_EQ(w->min_offset, -1);
    EXPECT_EQ(fby_depth(e), 1);
    EXPECT_EQ(max_absolute_read(Expr::at(x(), 4)), 4);
    EXPECT_EQ(max_absolute_read(e), -1);
    EXPECT_FALSE(relative_window(Expr::unary(Op::First, x())));
}
