#include <gtest/gtest.h>

#include <sstream>

#include "phase_machine.hpp"
#include "test_support.hpp"

namespace bb84mc {
namespace {

using test::build_text;
using test::capture_error;
using test::read_data;

constexpr const char* kTwoState =
    "dtmc\n\nmodule m\n  x : [0..1] init 0;\n\n  [] x=0 -> 0.3 : (x'=1) + 0.7 : (x'=0);\nendmodule\n";

TEST(Build, TwoStateChain) {
    Dtmc d = build_text(kTwoState);
    EXPECT_EQ(state_count(d), 2u);
    EXPECT_EQ(transition_count(d), 3u);
    auto row = d.row(0);
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(row[0].target, 0u);
    EXPECT_DOUBLE_EQ(row[0].probability, 0.7);
    EXPECT_EQ(row[1].target, 1u);
    EXPECT_DOUBLE_EQ(row[1].probability, 0.3);
    EXPECT_EQ(d.deadlocks(), std::vector<std::size_t>{1});
    ASSERT_EQ(d.row(1).size(), 1u);
    EXPECT_EQ(d.row(1)[0].target, 1u);
    EXPECT_EQ(d.row(1)[0].probability, 1.0);
}

TEST(Build, SynchronisedCommandsMultiply) {
    Dtmc d = build_text(
        "dtmc\nmodule a\n  x : [0..1] init 0;\n  [go] x=0 -> 0.5 : (x'=1) + 0.5 : (x'=0);\nendmodule\n"
        "module b\n  y : [0..1] init 0;\n  [go] y=0 -> 0.7 : (y'=1) + 0.3 : (y'=0);\nendmodule\n");
    double both = 0.0;
    for (const auto& t : d.row(0)) {
        auto s = d.state(t.target);
        if (s[0] == 1 && s[1] == 1) both = t.probability;
    }
    EXPECT_DOUBLE_EQ(both, 0.35);
    EXPECT_EQ(d.row(0).size(), 4u);
}

TEST(Build, ActionBlockedWhenAnyParticipantDisabled) {
    Dtmc d = build_text(
        "dtmc\nmodule a\n  x : [0..1] init 0;\n  [go] x=0 -> (x'=1);\nendmodule\n"
        "module b\n  y : [0..1] init 1;\n  [go] y=0 -> (y'=1);\nendmodule\n");
    EXPECT_EQ(d.state_count(), 1u);
    EXPECT_EQ(d.deadlocks().size(), 1u);
}

TEST(Build, ModulesOutsideAlphabetDoNotBlock) {
    Dtmc d = build_text(
        "dtmc\nmodule a\n  x : [0..1] init 0;\n  [go] x=0 -> (x'=1);\nendmodule\n"
        "module b\n  y : [0..1] init 0;\nendmodule\n");
    EXPECT_EQ(d.state_count(), 2u);
}

TEST(Build, EmptyModelIsOneSelfLoop) {
    Dtmc d = build_text(read_data("empty_module.pm"));
    EXPECT_EQ(d.state_count(), 1u);
    EXPECT_EQ(d.transition_count(), 1u);
    EXPECT_EQ(d.row(0)[0].target, 0u);
    EXPECT_EQ(d.deadlocks(), std::vector<std::size_t>{0});
}

TEST(Build, DuplicateTargetsMergeAndZeroBranchesDrop) {
    Dtmc d = build_text(
        "dtmc\nmodule m\n  x : [0..2] init 0;\n  [] x=0 -> 0.25 : (x'=1) + 0.25 : (x'=1) + 0.5 : (x'=0) + 0.0 : "
        "(x'=2);\nendmodule\n");
    EXPECT_EQ(d.state_count(), 2u);
    ASSERT_EQ(d.row(0).size(), 2u);
    EXPECT_DOUBLE_EQ(d.row(0)[1].probability, 0.5);
}

TEST(Build, LabelsAreSortedStateSets) {
    Dtmc d = build_text(read_data("toy_chain.pm"));
    EXPECT_EQ(d.state_count(), 3u);
    EXPECT_EQ(d.label("goal").size(), 1u);
    EXPECT_EQ(d.state(d.label("goal")[0])[0], 1);
    EXPECT_TRUE(d.has_label("sink"));
    EXPECT_FALSE(d.has_label("missing"));
}

TEST(Build, InterleavedUnlabeledCommandsAreNondeterministic) {
    auto e = capture_error([] {
        build_text(
            "dtmc\nmodule a\n  x : [0..1] init 0;\n  [] x=0 -> (x'=1);\nendmodule\n"
            "module b\n  y : [0..1] init 0;\n  [] y=0 -> (y'=1);\nendmodule\n");
    });
    EXPECT_EQ(e.kind(), ErrorKind::Nondeterminism);
    EXPECT_NE(e.detail().find("x=0"), std::string::npos) << e.what();
}

TEST(Build, LabelledAndUnlabeledBothEnabledIsNondeterministic) {
    auto e = capture_error([] {
        build_text("dtmc\nmodule a\n  x : [0..1] init 0;\n  [] x=0 -> (x'=1);\n  [go] x=0 -> (x'=1);\nendmodule\n");
    });
    EXPECT_EQ(e.kind(), ErrorKind::Nondeterminism);
}

TEST(Build, UpdateLeavingRangeIsBoundsError) {
    auto e = capture_error([] { build_text("dtmc\nmodule m\n  x : [0..2] init 0;\n  [] true -> (x'=x+1);\nendmodule\n"); });
    EXPECT_EQ(e.kind(), ErrorKind::Bounds);
    EXPECT_NE(e.detail().find("x=2"), std::string::npos) << e.what();
}

TEST(Build, ExportText) {
    std::ostringstream out;
    export_text(build_text(kTwoState), out);
    EXPECT_EQ(out.str(), "# states 2 transitions 3 initial 0\n# variables x\n0 0 0.69999999999999996\n0 1 "
                         "0.29999999999999999\n1 1 1\ndeadlock: 1\n");
}

void expect_row_stochastic(const Dtmc& d) {
    for (std::size_t s = 0; s < d.state_count(); ++s) {
        double sum = 0.0;
        std::size_t prev = 0;
        for (std::size_t k = 0; k < d.row(s).size(); ++k) {
            const auto& t = d.row(s)[k];
            EXPECT_GT(t.probability, 0.0);
            EXPECT_LT(t.target, d.state_count());
            if (k) {
                EXPECT_GT(t.target, prev);
            }
            prev = t.target;
            sum += t.probability;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12) << "state " << s;
    }
}

std::vector<Bb84Params> configurations(int n) {
    std::vector<Bb84Params> out;
    for (const auto& channel : {test::kPerfect, test::kNoisy, test::kVeryNoisy}) {
        for (double q : {0.2, 0.5, 1.0}) out.push_back(test::bb84(n, channel, q));
    }
    return out;
}

TEST(Bb84Build, MatchesReferencePhaseMachine) {
    for (int n : {1, 2, 3}) {
        for (auto p : configurations(n)) {
            for (auto mode : {Passthrough::ChannelOutput, Passthrough::SourceValues}) {
                p.passthrough = mode;
                Dtmc d = build(validate(parse(generate(p))));
                test::PhaseMachine ref(p);
                EXPECT_EQ(d.state_count(), ref.states()) << "n=" << n;
                EXPECT_EQ(d.transition_count(), ref.transitions) << "n=" << n;
            }
        }
    }
    // a biased source with a deterministic bit prunes the tree
    Bb84Params fixed = test::bb84(2, test::kPerfect, 1.0, 1.0);
    EXPECT_EQ(build(validate(parse(generate(fixed)))).state_count(), test::PhaseMachine(fixed).states());
}

TEST(Bb84Build, StateCountGrowsAffinelyInPhotons) {
    for (const auto& p : configurations(1)) {
        auto count = [&](int n) {
            Bb84Params q = p;
            q.photons = n;
            return static_cast<long>(build(validate(parse(generate(q)))).state_count());
        };
        long s10 = count(10), s20 = count(20), s30 = count(30);
        EXPECT_EQ(s20 - s10, s30 - s20);
        EXPECT_GT(s20, s10);
    }
}

TEST(Bb84Build, RowsAreStochastic) {
    for (const auto& p : configurations(3)) expect_row_stochastic(build(validate(parse(generate(p)))));
}

TEST(Bb84Build, RebuildIsIdentical) {
    Bb84Params p = test::bb84(6, test::kVeryNoisy, 0.5);
    std::ostringstream a, b;
    export_text(build(validate(parse(generate(p)))), a);
    export_text(build(validate(parse(generate(p)))), b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Bb84Build, EveryStateReachableAndDeadlocksAbsorbing) {
    Dtmc d = build(validate(parse(generate(test::bb84(4, test::kNoisy, 0.5)))));
    std::vector<bool> seen(d.state_count(), false);
    std::vector<std::size_t> work{d.initial()};
    seen[d.initial()] = true;
    while (!work.empty()) {
        std::size_t s = work.back();
        work.pop_back();
        for (const auto& t : d.row(s)) {
            if (!seen[t.target]) {
                seen[t.target] = true;
                work.push_back(t.target);
            }
        }
    }
    EXPECT_EQ(std::count(seen.begin(), seen.end(), true), static_cast<long>(d.state_count()));

    const auto& detected = d.label("detected");
    const auto& done = d.label("done");
    std::vector<std::size_t> absorbing;
    std::set_union(detected.begin(), detected.end(), done.begin(), done.end(), std::back_inserter(absorbing));
    EXPECT_EQ(d.deadlocks(), absorbing);
}

TEST(Bb84Build, DetectedStatesFollowMismatch) {
    Dtmc d = build(validate(parse(generate(test::bb84(2, test::kNoisy, 0.5)))));
    const auto& vars = d.variables();
    auto idx = [&](const std::string& name) {
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (vars[k].name == name) return k;
        }
        throw std::runtime_error(name);
    };
    const std::size_t phase = idx("phase"), al_bas = idx("al_bas"), al_bit = idx("al_bit"), bob_bas = idx("bob_bas"),
                      bob_bit = idx("bob_bit"), detected = idx("detected"), i = idx("i");
    std::size_t detections = 0, advances = 0;
    for (std::size_t s = 0; s < d.state_count(); ++s) {
        auto st = d.state(s);
        if (st[phase] != 5 || st[detected] != 0) continue;
        bool mismatch = st[bob_bas] == st[al_bas] && st[bob_bit] != st[al_bit];
        ASSERT_EQ(d.row(s).size(), 1u);
        auto next = d.state(d.row(s)[0].target);
        if (mismatch) {
            ++detections;
            EXPECT_EQ(next[detected], 1);
            EXPECT_EQ(next[phase], 5);
        } else if (st[i] < 2) {
            ++advances;
            EXPECT_EQ(next[detected], 0);
            EXPECT_EQ(next[phase], 0);
            EXPECT_EQ(next[i], st[i] + 1);
        } else {
            EXPECT_EQ(d.row(s)[0].target, s);
        }
    }
    EXPECT_GT(detections, 0u);
    EXPECT_GT(advances, 0u);
}

}  // namespace
}  // namespace bb84mc
