#include <gtest/gtest.h>

#include <json.hpp>

#include "corpus.hpp"
#include "stcsp/automaton.hpp"
#include "stcsp/normalizer.hpp"
#include "stcsp/parser.hpp"
#include "stcsp/solver.hpp"

using namespace stcsp;

namespace {

BuchiAutomaton solved(const std::string& text) {
    return prune(solve(normalize(parse_or_throw({text, "<test>"})).normal).automaton);
}

BuchiAutomaton one_var(std::size_t states) {
    BuchiAutomaton a;
    a.vars.push_back({"x", {0, 1}, VarOrigin::User, 0});
    for (std::size_t i = 0; i < states; ++i) a.add_state(false);
    return a;
}

StreamPrefix bits(const std::string& s) {
    StreamPrefix p;
    for (char c : s) p.steps.push_back({c - '0'});
    return p;
}

std::set<StreamPrefix> bit_set(std::initializer_list<const char*> xs) {
    std::set<StreamPrefix> out;
    for (const char* x : xs) out.insert(bits(x));
    return out;
}

const char* kUntil = "var x with alphabet [0..1]; 1 until (x eq 1);";

}  // namespace

TEST(Prune, RemovesNonAcceptingDeadEnd) {
    // 0 loops on 0 and moves to the accepting state 1 on 1; 1 loops on 0 and falls into the dead end 2 on 1
    BuchiAutomaton a = one_var(3);
    a.accepting[1] = true;
    a.add_transition(0, {0}, 0);
    a.add_transition(0, {1}, 1);
    a.add_transition(1, {0}, 1);
    a.add_transition(1, {1}, 2);
    BuchiAutomaton b = prune(a);
    EXPECT_EQ(b.state_count(), 2u);
    // prefixes through the dead end disappear, the rest stay
    auto before = enumerate_prefixes(a, 5);
    auto after = enumerate_prefixes(b, 5);
    for (const auto& p : after) EXPECT_TRUE(before.count(p));
    for (const auto& p : before) {
        bool through_dead = false;
        StateId s = 0;
        for (const auto& l : p.steps) {
            s = *a.step(s, l);
            through_dead = through_dead || s == 2;
        }
        EXPECT_EQ(after.count(p) == 1, !through_dead);
    }
}

TEST(Prune, RemovesAcceptingDeadEnd) {
    BuchiAutomaton a = one_var(2);
    a.accepting[1] = true;
    a.add_transition(0, {0}, 0);
    a.add_transition(0, {1}, 1);
    EXPECT_TRUE(prune(a).empty());
}

TEST(Prune, AllAcceptingUnchanged) {
    BuchiAutomaton a = one_var(2);
    a.accepting = {true, true};
    a.add_transition(0, {0}, 1);
    a.add_transition(1, {1}, 0);
    EXPECT_EQ(prune(a), a);
}

TEST(Prune, NoAcceptingGivesEmpty) {
    BuchiAutomaton a = one_var(1);
    a.add_transition(0, {0}, 0);
    BuchiAutomaton b = prune(a);
    EXPECT_TRUE(b.empty());
    EXPECT_EQ(b.state_count(), 0u);
}

TEST(Prune, Idempotent) {
    for (const auto& m : corpus::random_models(80, 8)) {
        BuchiAutomaton once = prune(solve(normalize(corpus::parse(m)).normal).automaton);
        EXPECT_EQ(prune(once), once) << m.text;
    }
}

TEST(Enumerate, Examples) {
    EXPECT_EQ(enumerate_prefixes(solved(kUntil), 2, solved(kUntil).user_positions()), bit_set({"00", "01", "10", "11"}));
    EXPECT_EQ(enumerate_prefixes(solved("var x with alphabet [0..1]; x == 0;"), 3), bit_set({"000"}));
    EXPECT_TRUE(enumerate_prefixes(BuchiAutomaton{}, 3).empty());
}

TEST(Enumerate, CapReportsBound) {
    BuchiAutomaton a = solved("var x with alphabet [0..1];  x >= 0;");
    try {
        (void)enumerate_prefixes(a, 12, std::nullopt, 100);
        FAIL() << "expected the cap to trip";
    } catch (const PrefixCapExceeded& e) {
        EXPECT_GT(e.bound, 100u);
    }
}

TEST(Lasso, Examples) {
    BuchiAutomaton u = solved(kUntil);
    auto label = [&](Value x) {
        // the single transition from the initial state whose user value is x fixes the aux values
        for (const auto& t : u.transitions[*u.initial]) {
            if (t.label[u.user_positions()[0]] == x) return t.label;
        }
        return InstantaneousAssignment{};
    };
    InstantaneousAssignment zero = label(0), one = label(1);
    EXPECT_TRUE(accepts_lasso(u, {one}, {zero}));
    EXPECT_FALSE(accepts_lasso(u, {}, {zero}));

    BuchiAutomaton z = solved("var x with alphabet [0..1]; x == 0;");
    EXPECT_TRUE(accepts_lasso(z, {}, {{0}}));
    EXPECT_THROW((void)accepts_lasso(z, {}, {{1}}), InvalidRun);
}

TEST(Run, VisitsStates) {
    BuchiAutomaton a = one_var(2);
    a.add_transition(0, {1}, 1);
    a.add_transition(1, {0}, 0);
    stcsp::Run r = run(a, {{1}, {0}, {1}});
    EXPECT_EQ(r.visited, (std::vector<StateId>{0, 1, 0, 1}));
    EXPECT_THROW((void)run(a, {{0}}), InvalidRun);
}

TEST(Distance, ToAccepting) {
    EXPECT_EQ(distance_to_accepting(solved(kUntil)), 1u);
    EXPECT_EQ(distance_to_accepting(solved("var x with alphabet [0..1]; x == 0;")), 0u);
    EXPECT_FALSE(distance_to_accepting(BuchiAutomaton{}));
}

TEST(Difference, FindsShortestWitness) {
    BuchiAutomaton u = solved(kUntil);
    BuchiAutomaton w = solved("var x with alphabet [0..1]; 1 until (x eq 1); first x == 0;");
    auto pu = u.user_positions(), pw = w.user_positions();
    EXPECT_FALSE(first_projected_difference(u, pu, u, pu, 6));
    auto d = first_projected_difference(u, pu, w, pw, 6);
    ASSERT_TRUE(d);
    EXPECT_EQ(*d, bits("1"));
}

TEST(Export, EmptyJson) {
    auto j = nlohmann::json::parse(export_json(BuchiAutomaton{}));
    EXPECT_TRUE(j["initial"].is_null());
    EXPECT_TRUE(j["accepting"].empty());
    EXPECT_TRUE(j["transitions"].empty());
    EXPECT_TRUE(j["vars"].empty());
}

TEST(Export, JsonSchemaAndKeyOrder) {
    BuchiAutomaton a = solved("var x with alphabet [0..1]; x == 0;");
    std::string text = export_json(a);
    auto j = nlohmann::json::parse(text);
    EXPECT_LT(text.find("\"vars\""), text.find("\"initial\""));
    EXPECT_LT(text.find("\"initial\""), text.find("\"accepting\""));
    EXPECT_LT(text.find("\"accepting\""), text.find("\"transitions\""));
    ASSERT_EQ(j["vars"].size(), 1u);
    EXPECT_EQ(j["vars"][0]["name"], "x");
    EXPECT_EQ(j["vars"][0]["lo"], 0);
    EXPECT_EQ(j["vars"][0]["hi"], 1);
    ASSERT_EQ(j["transitions"].size(), 1u);
    EXPECT_EQ(j["transitions"][0]["from"], j["transitions"][0]["to"]);
    EXPECT_EQ(j["transitions"][0]["label"], nlohmann::json::array({0}));
}

TEST(Export, JsonRoundTrip) {
    for (const auto& m : corpus::random_models(40, 14)) {
        BuchiAutomaton a = solve(normalize(corpus::parse(m)).normal).automaton;
        EXPECT_EQ(automaton_from_json(export_json(a)), a) << m.text;
    }
}

TEST(Export, DotMarksAccepting) {
    BuchiAutomaton u = solved(kUntil);
    std::string dot = export_dot(u, u.user_positions());
    std::size_t count = 0;
    for (std::size_t at = dot.find("doublecircle"); at != std::string::npos; at = dot.find("doublecircle", at + 1)) ++count;
    EXPECT_EQ(count, 1u);
    EXPECT_NE(dot.find("x=1"), std::string::npos);
    EXPECT_EQ(dot.find("_aux"), std::string::npos);
    EXPECT_NE(export_dot(u).find("_aux"), std::string::npos);
}
