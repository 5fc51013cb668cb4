#include <gtest/gtest.h>

#include <cmath>

#include "phase_machine.hpp"
#include "test_support.hpp"

namespace bb84mc {
namespace {

using test::build_text;
using test::capture_error;
using test::read_data;

SolveReport check(const Dtmc& d, const std::string& prop, SolveOptions options = {}) {
    return prob_until(d, parse_property(prop, d), options);
}

TEST(Property, ParsesEventuallyAndUntil) {
    auto f = parse_property("P=? [ F \"goal\" ]");
    EXPECT_EQ(f.kind, PropertyQuery::Kind::Eventually);
    EXPECT_EQ(std::get<std::string>(f.target.value), "goal");
    auto u = parse_property("P=? [ x<2 U \"goal\" ]");
    EXPECT_EQ(u.kind, PropertyQuery::Kind::Until);
    EXPECT_TRUE(structurally_equal(std::get<ExprPtr>(u.constraint.value), parse_expression("x<2")));
}

TEST(Property, PrintsBackAsWritten) {
    for (const char* text : {"P=? [ F \"goal\" ]", "P=? [ true U \"goal\" ]", "P=? [ (x<2) U (x=1) ]",
                             "P=? [ F detected ]"}) {
        EXPECT_EQ(print(parse_property(text)), text);
    }
}

TEST(Property, Malformed) {
    EXPECT_EQ(capture_error([] { parse_property("P=? [ \"goal\" ]"); }).kind(), ErrorKind::Syntax);
    EXPECT_EQ(capture_error([] { parse_property("Q=? [ F \"goal\" ]"); }).kind(), ErrorKind::Syntax);
    EXPECT_EQ(capture_error([] { parse_property("P=? [ F \"goal\""); }).kind(), ErrorKind::Syntax);
}

TEST(Property, UnknownLabelAndIdentifier) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    EXPECT_EQ(capture_error([&] { parse_property("P=? [ F \"nope\" ]", d); }).kind(), ErrorKind::UnknownLabel);
    EXPECT_EQ(capture_error([&] { parse_property("P=? [ F y=1 ]", d); }).kind(), ErrorKind::UnknownIdentifier);
    EXPECT_EQ(capture_error([&] { parse_property("P=? [ F x+1 ]", d); }).kind(), ErrorKind::Type);
}

TEST(Solver, OneStepChain) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    SolveReport r = check(d, "P=? [ F \"goal\" ]");
    EXPECT_NEAR(r.probability, 0.3, 1e-12);
    auto zero = prob0_states(d, parse_property("P=? [ F \"goal\" ]"));
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_EQ(d.state(zero[0])[0], 2);
}

TEST(Solver, GeometricRetryReachesOne) {
    Dtmc d = build_text(read_data("geometric.pm"));
    SolveReport r = check(d, "P=? [ F \"goal\" ]");
    EXPECT_NEAR(r.probability, 1.0, 1e-12);
    EXPECT_EQ(r.prob1_count, 2u);
}

TEST(Solver, TargetEverywhereLeavesNoProbZeroStates) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    auto q = parse_property("P=? [ F true ]");
    EXPECT_TRUE(prob0_states(d, q).empty());
    EXPECT_EQ(prob1_states(d, q).size(), d.state_count());
    EXPECT_EQ(prob_until(d, q).probability, 1.0);
}

TEST(Solver, UnreachableTargetIsExactlyZero) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    SolveReport r = check(d, "P=? [ F x=5 ]");
    EXPECT_EQ(r.probability, 0.0);
    EXPECT_EQ(r.iterations, 0u);
}

TEST(Solver, EventuallyEqualsTrueUntil) {
    Dtmc d = build(validate(parse(generate(test::bb84(3, test::kNoisy, 0.5)))));
    auto f = check(d, "P=? [ F \"detected\" ]");
    auto u = check(d, "P=? [ true U \"detected\" ]");
    EXPECT_EQ(f.probability, u.probability);
    EXPECT_EQ(f.values, u.values);
}

TEST(Solver, ConstraintRestrictsPaths) {
    // x counts up 0,1,2,3; reaching 3 through x<2 only is impossible
    Dtmc d = build_text("dtmc\nmodule m\n  x : [0..3] init 0;\n  [] x<3 -> (x'=x+1);\nendmodule\n");
    EXPECT_EQ(check(d, "P=? [ x<2 U x=3 ]").probability, 0.0);
    EXPECT_EQ(check(d, "P=? [ x<3 U x=3 ]").probability, 1.0);
}

TEST(Solver, SweepsIncreaseMonotonically) {
    Dtmc d = build(validate(parse(generate(test::bb84(6, test::kVeryNoisy, 0.5)))));
    std::vector<double> previous;
    bool monotone = true;
    SolveOptions options;
    options.on_sweep = [&](std::size_t, std::span<const double> values) {
        if (!previous.empty()) {
            for (std::size_t s = 0; s < values.size(); ++s) monotone = monotone && values[s] >= previous[s];
        }
        previous.assign(values.begin(), values.end());
    };
    auto r = prob_until(d, parse_property("P=? [ F \"detected\" ]"), options);
    EXPECT_TRUE(monotone);
    EXPECT_GT(r.iterations, 0u);
    EXPECT_LT(r.residual, 1e-12);
}

TEST(Solver, GraphAndNumericAgree) {
    Dtmc d = build(validate(parse(generate(test::bb84(3, test::kNoisy, 0.5)))));
    auto q = parse_property("P=? [ F \"detected\" ]");
    auto r = prob_until(d, q);
    for (std::size_t s : prob0_states(d, q)) EXPECT_EQ(r.values[s], 0.0);
    for (std::size_t s : prob1_states(d, q)) EXPECT_NEAR(r.values[s], 1.0, 1e-12);
    for (std::size_t s = 0; s < d.state_count(); ++s) {
        EXPECT_GE(r.values[s], 0.0);
        EXPECT_LE(r.values[s], 1.0 + 1e-12);
    }
}

TEST(Solver, PerfectChannelFullAttackFivePhotons) {
    Dtmc d = build(validate(parse(generate(test::bb84(5)))));
    auto r = check(d, "P=? [ F \"detected\" ]");
    EXPECT_NEAR(r.probability, 1.0 - std::pow(7.0 / 8.0, 5), 1e-12);
    EXPECT_EQ(format_probability(r.probability), "0.487091064453");
}

TEST(Solver, NoAttackMeansInitialStateIsProbZero) {
    Dtmc d = build(validate(parse(generate(test::bb84(4, test::kPerfect, 0.0)))));
    auto q = parse_property("P=? [ F \"detected\" ]");
    auto zero = prob0_states(d, q);
    EXPECT_TRUE(std::binary_search(zero.begin(), zero.end(), d.initial()));
    EXPECT_EQ(prob_until(d, q).probability, 0.0);
}

TEST(Solver, MatchesReferenceRecursion) {
    for (double q : {0.2, 1.0}) {
        Bb84Params p = test::bb84(3, test::kVeryNoisy, q, 0.3);
        Dtmc d = build(validate(parse(generate(p))));
        EXPECT_NEAR(check(d, "P=? [ F \"detected\" ]").probability, test::PhaseMachine(p).detection_probability(),
                    1e-12);
    }
}

TEST(Solver, IterationBudgetExhausted) {
    Dtmc d = build(validate(parse(generate(test::bb84(5, test::kNoisy, 0.5)))));
    SolveOptions options;
    options.max_iterations = 1;
    auto e = capture_error([&] { check(d, "P=? [ F \"detected\" ]", options); });
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
}

TEST(Solver, RejectsNonPositiveTolerance) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    SolveOptions options;
    options.tolerance = 0.0;
    EXPECT_EQ(capture_error([&] { check(d, "P=? [ F \"goal\" ]", options); }).kind(), ErrorKind::InvalidParameter);
}

}  // namespace
}  // namespace bb84mc
