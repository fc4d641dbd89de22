#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/staircase_reference.hpp"
#include "stiffjnd/error.hpp"
#include "stiffjnd/staircase.hpp"

namespace stiffjnd {
namespace {

constexpr double kTol = 1e-12;

StaircaseState apply(StaircaseState state, std::initializer_list<bool> responses, const StaircaseConfig& config) {
    for (bool r : responses) state = update(state, r, config);
    return state;
}

// A state with `n` reversals, built directly for the termination/JND tests.
StaircaseState with_reversals(std::vector<double> scales) {
    StaircaseState s;
    s.current_scale = 1.0;
    Direction d = Direction::Up;
    int trial = 0;
    for (double v : scales) {
        s.reversals.push_back({v, d, ++trial});
        d = d == Direction::Up ? Direction::Down : Direction::Up;
    }
    return s;
}

TEST(StaircaseInit, StartsAtOneFiftyPercent) {
    const StaircaseConfig config;
    const auto s = init(config);
    EXPECT_EQ(s.current_scale, 1.50);
    EXPECT_EQ(s.consecutive_correct, 0);
    EXPECT_EQ(s.last_direction, Direction::None);
    EXPECT_TRUE(s.reversals.empty());
    EXPECT_EQ(s.trial_count, 0);
}

TEST(StaircaseInit, DefaultsMatchProtocolConstants) {
    const StaircaseConfig c;
    EXPECT_EQ(c.start_scale, 1.50);
    EXPECT_EQ(c.up_step_initial, 0.10);
    EXPECT_EQ(c.down_step_initial, 0.0732);
    EXPECT_EQ(c.up_step_late, 0.05);
    EXPECT_EQ(c.down_step_late, 0.0366);
    EXPECT_EQ(c.step_change_after_reversals, 2);
    EXPECT_EQ(c.terminate_after_reversals, 10);
    EXPECT_EQ(c.jnd_window_reversals, 8);
    EXPECT_EQ(c.floor_scale, 1.0);
}

TEST(StaircaseInit, StartAtFloorIsValid) {
    StaircaseConfig c;
    c.start_scale = 1.0;
    c.floor_scale = 1.0;
    EXPECT_EQ(init(c).current_scale, 1.0);
}

TEST(StaircaseInit, StartBelowFloorIsAConfigError) {
    StaircaseConfig c;
    c.start_scale = 0.9;
    EXPECT_THROW(init(c), ConfigError);
}

TEST(StaircaseConfig, ReportsEveryViolation) {
    StaircaseConfig c;
    c.down_step_initial = 0.0;
    c.up_step_late = -1.0;
    c.jnd_window_reversals = 11;
    const auto v = c.violations();
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].field, "staircase.down_step_initial");
    EXPECT_EQ(v[1].field, "staircase.up_step_late");
    EXPECT_EQ(v[2].field, "staircase.jnd_window_reversals");
}

TEST(StaircaseUpdate, ThreeCorrectStepDown) {
    const StaircaseConfig c;
    auto s = init(c);
    s = update(s, true, c);
    EXPECT_EQ(s.current_scale, 1.50);
    EXPECT_EQ(s.consecutive_correct, 1);
    s = update(s, true, c);
    EXPECT_EQ(s.consecutive_correct, 2);
    s = update(s, true, c);
    EXPECT_NEAR(s.current_scale, 1.4268, kTol);
    EXPECT_EQ(s.consecutive_correct, 0);
    EXPECT_EQ(s.last_direction, Direction::Down);
    EXPECT_TRUE(s.reversals.empty());
}

TEST(StaircaseUpdate, DirectionChangeRecordsReversal) {
    const StaircaseConfig c;
    auto s = apply(init(c), {true, true, true}, c);
    s = update(s, false, c);
    EXPECT_NEAR(s.current_scale, 1.5268, kTol);
    ASSERT_EQ(s.reversals.size(), 1u);
    EXPECT_NEAR(s.reversals[0].scale, 1.4268, kTol);
    EXPECT_EQ(s.reversals[0].new_direction, Direction::Up);
    EXPECT_TRUE(s.last_event.reversal);
}

TEST(StaircaseUpdate, FirstStepIsNeverAReversal) {
    const StaircaseConfig c;
    const auto s = update(init(c), false, c);
    EXPECT_NEAR(s.current_scale, 1.60, kTol);
    EXPECT_TRUE(s.reversals.empty());
    EXPECT_EQ(s.last_direction, Direction::Up);
}

TEST(StaircaseUpdate, ClampsAtFloor) {
    const StaircaseConfig c;
    StaircaseState s;
    s.current_scale = 1.02;
    s.last_direction = Direction::Down;
    s.reversals = with_reversals({1.1, 1.05}).reversals;  // late steps active
    s = apply(s, {true, true, true}, c);
    EXPECT_EQ(s.current_scale, 1.00);
    EXPECT_EQ(s.last_event.phase, StepPhase::Late);
}

TEST(StaircaseUpdate, AbsorbedStepStillUpdatesDirection) {
    StaircaseConfig c;
    c.start_scale = 1.0;
    auto s = apply(init(c), {false, true, true, true}, c);  // up to 1.1, down to 1.0268
    s = apply(s, {true, true, true}, c);                     // clamp to 1.0
    EXPECT_EQ(s.current_scale, 1.0);
    s = apply(s, {true, true, true}, c);                     // fully absorbed
    EXPECT_EQ(s.current_scale, 1.0);
    EXPECT_EQ(s.last_direction, Direction::Down);
    s = update(s, false, c);                                 // reversal at the floor
    ASSERT_FALSE(s.reversals.empty());
    EXPECT_EQ(s.reversals.back().scale, 1.0);
}

TEST(StaircaseUpdate, StepPairSwitchesAfterTwoReversals) {
    const StaircaseConfig c;
    // down (1.4268), up with reversal 1 (1.5268), down with reversal 2 -> late step
    auto s = apply(init(c), {true, true, true, false}, c);
    EXPECT_EQ(s.last_event.phase, StepPhase::Initial);
    s = apply(s, {true, true, true}, c);
    ASSERT_EQ(s.reversals.size(), 2u);
    EXPECT_EQ(s.last_event.phase, StepPhase::Late);
    EXPECT_NEAR(s.current_scale, 1.5268 - 0.0366, kTol);
    s = update(s, false, c);
    EXPECT_NEAR(s.current_scale, 1.5268 - 0.0366 + 0.05, kTol);
}

TEST(StaircaseUpdate, RefusesAfterTermination) {
    const StaircaseConfig c;
    auto s = with_reversals(std::vector<double>(10, 1.1));
    EXPECT_THROW(update(s, true, c), ProtocolError);
}

TEST(StaircaseTermination, StrictTenReversalThreshold) {
    const StaircaseConfig c;
    EXPECT_FALSE(is_terminated(init(c), c));
    EXPECT_FALSE(is_terminated(with_reversals(std::vector<double>(9, 1.1)), c));
    EXPECT_TRUE(is_terminated(with_reversals(std::vector<double>(10, 1.1)), c));
}

TEST(StaircaseJnd, MeanOfLastEightReversals) {
    const StaircaseConfig c;
    const auto s = with_reversals({1.5, 1.4, 1.20, 1.12, 1.18, 1.10, 1.16, 1.11, 1.15, 1.12});
    const auto jnd = compute_jnd(s, c);
    EXPECT_NEAR(jnd.jnd_percent, 14.25, 1e-9);
    EXPECT_EQ(jnd.reversal_scales_used, (std::vector<double>{1.20, 1.12, 1.18, 1.10, 1.16, 1.11, 1.15, 1.12}));
}

TEST(StaircaseJnd, FloorPinnedAndConstantRuns) {
    const StaircaseConfig c;
    EXPECT_NEAR(compute_jnd(with_reversals(std::vector<double>(10, 1.0)), c).jnd_percent, 0.0, 1e-12);
    EXPECT_NEAR(compute_jnd(with_reversals(std::vector<double>(10, 1.15)), c).jnd_percent, 15.0, 1e-9);
}

TEST(StaircaseJnd, RefusedBeforeTermination) {
    const StaircaseConfig c;
    EXPECT_THROW(compute_jnd(with_reversals(std::vector<double>(9, 1.1)), c), ProtocolError);
}

TEST(Equilibrium, WeightedStepsClosedForm) {
    EXPECT_NEAR(equilibrium_proportion(0.10, 0.0732), 0.8326913197, 1e-9);
    EXPECT_NEAR(equilibrium_proportion(StaircaseConfig{}), 0.8326913197, 1e-9);
    // the late pair has the same ratio
    EXPECT_NEAR(equilibrium_proportion(0.05, 0.0366), equilibrium_proportion(0.10, 0.0732), 1e-15);
}

TEST(Equilibrium, EqualStepsGiveClassicValue) {
    EXPECT_NEAR(equilibrium_proportion(0.07, 0.07), 0.7937005259840998, 1e-12);
}

TEST(Equilibrium, VanishingDownStepApproachesOne) {
    EXPECT_NEAR(equilibrium_proportion(0.1, 1e-12), 1.0, 1e-9);
}

// Properties

TEST(StaircaseProperties, MatchesReferenceTranscription) {
    const StaircaseConfig c;
    std::mt19937_64 gen(7);
    for (int seq = 0; seq < 10000; ++seq) {
        const double p = std::uniform_real_distribution<double>(0.3, 1.0)(gen);
        std::vector<bool> responses(200);
        for (auto&& r : responses) r = std::bernoulli_distribution(p)(gen);

        const auto ref = oracle::run_reference(responses);
        auto s = init(c);
        int i = 0;
        while (!is_terminated(s, c) && i < static_cast<int>(responses.size())) {
            s = update(s, responses[static_cast<std::size_t>(i)], c);
            ASSERT_EQ(s.current_scale, ref.scales_after[static_cast<std::size_t>(i)]);
            ++i;
        }
        ASSERT_EQ(i, ref.processed);
        ASSERT_EQ(s.current_scale, ref.scale);
        ASSERT_EQ(s.consecutive_correct, ref.run_of_correct);
        ASSERT_EQ(s.reversal_scales(), ref.reversal_levels);
    }
}

TEST(StaircaseProperties, FloorParityAndStepRules) {
    const StaircaseConfig c;
    std::mt19937_64 gen(99);
    for (int seq = 0; seq < 2000; ++seq) {
        const double p = std::uniform_real_distribution<double>(0.5, 1.0)(gen);
        auto s = init(c);
        int run = 0;
        for (int t = 0; t < 300 && !is_terminated(s, c); ++t) {
            const bool correct = std::bernoulli_distribution(p)(gen);
            const auto next = update(s, correct, c);
            ASSERT_GE(next.current_scale, c.floor_scale);

            run = correct ? run + 1 : 0;
            const bool expect_down = correct && run == 3;
            if (expect_down) run = 0;
            ASSERT_EQ(next.last_event.stepped, !correct || expect_down);
            if (next.last_event.stepped) {
                ASSERT_EQ(next.consecutive_correct, 0);
                const bool late = next.reversals.size() >= 2;
                const double up = late ? c.up_step_late : c.up_step_initial;
                const double down = late ? c.down_step_late : c.down_step_initial;
                const double expected = correct ? std::max(1.0, s.current_scale - down) : s.current_scale + up;
                ASSERT_EQ(next.current_scale, expected);
            }
            s = next;
        }
        for (std::size_t i = 1; i < s.reversals.size(); ++i) {
            ASSERT_NE(s.reversals[i].new_direction, s.reversals[i - 1].new_direction);
        }
        ASSERT_LE(s.reversals.size(), static_cast<std::size_t>(c.terminate_after_reversals));
    }
}

TEST(StaircaseProperties, DriftSignAroundEquilibrium) {
    // Constant-p observer, start far above the floor so clamping never acts.
    StaircaseConfig c;
    c.start_scale = 1000.0;
    c.terminate_after_reversals = 1 << 30;
    c.jnd_window_reversals = 1;
    const double eq = equilibrium_proportion(c);
    std::mt19937_64 gen(3);
    auto drift = [&](double p) {
        auto s = init(c);
        constexpr int kTrials = 100000;
        for (int t = 0; t < kTrials; ++t) s = update(std::move(s), std::bernoulli_distribution(p)(gen), c);
        return (s.current_scale - c.start_scale) / kTrials;
    };
    EXPECT_LT(drift(eq + 0.03), 0.0);
    EXPECT_GT(drift(eq - 0.03), 0.0);
}

} // namespace
} // namespace stiffjnd
