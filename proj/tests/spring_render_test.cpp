#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "stiffjnd/error.hpp"
#include "stiffjnd/spring_render.hpp"

namespace stiffjnd {
namespace {

constexpr double kTol = 1e-12;

TEST(RenderTorques, BimanualSumsBothDisplacements) {
    const auto t = render_torques(ConditionMode::C1, {1.0, 1.5}, {10.0, 5.0});
    EXPECT_NEAR(t.tau_left, 22.5, kTol);
    EXPECT_NEAR(t.tau_right, 22.5, kTol);
}

TEST(RenderTorques, NeutralPositionIsTorqueFree) {
    for (ConditionMode mode : kAllConditions) {
        const auto t = render_torques(mode, {1.37, 2.2}, {0.0, 0.0});
        EXPECT_EQ(t, (TorqueCommand{0.0, 0.0})) << to_string(mode);
    }
}

TEST(RenderTorques, UnimanualGroundedSpring) {
    const auto t = render_torques(ConditionMode::C2L, {1.2, 1.5}, {20.0, 30.0});
    EXPECT_NEAR(t.tau_left, 36.0, kTol);
    EXPECT_EQ(t.tau_right, 0.0);
}

TEST(RenderTorques, StationaryLeftWristIsExcluded) {
    const auto t = render_torques(ConditionMode::C3L, {1.0, 1.5}, {7.0, 10.0});
    EXPECT_NEAR(t.tau_left, 15.0, kTol);
    EXPECT_NEAR(t.tau_right, 15.0, kTol);
}

TEST(RenderTorques, NoFeedbackToLeftWrist) {
    const auto t = render_torques(ConditionMode::C4L, {1.0, 1.5}, {10.0, 10.0});
    EXPECT_EQ(t.tau_left, 0.0);
    EXPECT_NEAR(t.tau_right, 30.0, kTol);
}

TEST(RenderTorques, RejectsNonFiniteAngles) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(render_torques(ConditionMode::C1, {1.0, 1.5}, {nan, 0.0}), InvalidInputError);
    EXPECT_THROW(render_torques(ConditionMode::C2R, {1.0, 1.5}, {0.0, inf}), InvalidInputError);
}

TEST(RenderTorques, RejectsInvalidSpring) {
    EXPECT_THROW(render_torques(ConditionMode::C1, {0.99, 1.5}, {1.0, 1.0}), InvalidInputError);
    EXPECT_THROW(render_torques(ConditionMode::C1, {1.0, 0.0}, {1.0, 1.0}), InvalidInputError);
}

TEST(Saturate, ClampsSymmetrically) {
    const PlantParams plant;
    EXPECT_EQ(saturate({600.0, 600.0}, plant), (TorqueCommand{467.0, 467.0}));
    EXPECT_EQ(saturate({22.5, 22.5}, plant), (TorqueCommand{22.5, 22.5}));
    EXPECT_EQ(saturate({-500.0, 100.0}, plant), (TorqueCommand{-467.0, 100.0}));
}

TEST(QuantizeAngle, DefaultQuantumIsPoint18Degrees) {
    EXPECT_NEAR(PlantParams{}.quantum(), 0.18, 1e-15);
}

TEST(QuantizeAngle, TruncatesTowardZero) {
    const PlantParams plant;
    EXPECT_NEAR(quantize_angle(10.07, plant), 9.90, kTol);
    EXPECT_EQ(quantize_angle(0.0, plant), 0.0);
    EXPECT_NEAR(quantize_angle(-0.19, plant), -0.18, kTol);
    EXPECT_EQ(quantize_angle(0.17, plant), 0.0);
}

TEST(QuantizeAngle, ExactMultiplesAreFixedPoints) {
    const PlantParams plant;
    for (int counts = -5000; counts <= 5000; ++counts) {
        const double q = counts * plant.quantum();
        ASSERT_EQ(quantize_angle(q, plant), q) << counts;
    }
}

TEST(Tick, QuantizesThenRenders) {
    const PlantParams plant;
    const auto t = tick(ConditionMode::C1, {1.0, 1.5}, {10.07, 0.0}, plant);
    EXPECT_NEAR(t.tau_left, 14.85, kTol);
    EXPECT_NEAR(t.tau_right, 14.85, kTol);
    EXPECT_EQ(tick(ConditionMode::C1, {1.0, 1.5}, {0.0, 0.0}, plant), (TorqueCommand{0.0, 0.0}));
}

TEST(Tick, SaturatesLargeDisplacements) {
    // 1.5 * 1.5 * 400 = 900 mNm raw
    const auto t = tick(ConditionMode::C1, {1.5, 1.5}, {200.0, 200.0}, PlantParams{});
    EXPECT_EQ(t, (TorqueCommand{467.0, 467.0}));
}

TEST(ConditionMode, NamesRoundTrip) {
    for (ConditionMode mode : kAllConditions) {
        EXPECT_EQ(parse_condition(to_string(mode)), mode);
        EXPECT_EQ(mirror(mirror(mode)), mode);
        EXPECT_EQ(exploration_mode(mode), exploration_mode(mirror(mode)));
    }
    EXPECT_FALSE(parse_condition("C5").has_value());
}

// Properties over random inputs.

class RenderProperties : public ::testing::Test {
protected:
    std::mt19937_64 gen{20240917};
    double angle() { return std::uniform_real_distribution<double>(-90.0, 90.0)(gen); }
    double scale() { return std::uniform_real_distribution<double>(1.0, 2.0)(gen); }
    double kappa() { return std::uniform_real_distribution<double>(0.1, 5.0)(gen); }
};

TEST_F(RenderProperties, MirrorSymmetry) {
    for (int i = 0; i < 10000; ++i) {
        const SpringParams spring{scale(), kappa()};
        const WristState w{angle(), angle()};
        const WristState swapped{w.theta_right, w.theta_left};
        for (ConditionMode left : {ConditionMode::C2L, ConditionMode::C3L, ConditionMode::C4L}) {
            const auto a = render_torques(left, spring, w);
            const auto b = render_torques(mirror(left), spring, swapped);
            ASSERT_EQ(a.tau_left, b.tau_right);
            ASSERT_EQ(a.tau_right, b.tau_left);
        }
    }
}

TEST_F(RenderProperties, ZeroAndEqualFeedbackSides) {
    for (int i = 0; i < 10000; ++i) {
        const SpringParams spring{scale(), kappa()};
        const WristState w{angle(), angle()};
        ASSERT_EQ(render_torques(ConditionMode::C2L, spring, w).tau_right, 0.0);
        ASSERT_EQ(render_torques(ConditionMode::C2R, spring, w).tau_left, 0.0);
        ASSERT_EQ(render_torques(ConditionMode::C4L, spring, w).tau_left, 0.0);
        ASSERT_EQ(render_torques(ConditionMode::C4R, spring, w).tau_right, 0.0);
        for (ConditionMode mode : {ConditionMode::C1, ConditionMode::C3L, ConditionMode::C3R}) {
            const auto t = render_torques(mode, spring, w);
            ASSERT_EQ(t.tau_left, t.tau_right);
        }
    }
}

TEST_F(RenderProperties, LinearBelowSaturation) {
    for (int i = 0; i < 2000; ++i) {
        const SpringParams spring{scale(), kappa()};
        const WristState w{angle(), angle()};
        const double c = std::uniform_real_distribution<double>(1.0, 3.0)(gen);
        for (ConditionMode mode : kAllConditions) {
            const auto base = render_torques(mode, spring, w);
            const auto by_s = render_torques(mode, {spring.scale * c, spring.kappa}, w);
            const auto by_k = render_torques(mode, {spring.scale, spring.kappa * c}, w);
            const auto by_theta = render_torques(mode, spring, {w.theta_left * c, w.theta_right * c});
            for (const auto& scaled : {by_s, by_k, by_theta}) {
                ASSERT_NEAR(scaled.tau_left, c * base.tau_left, 1e-9 * (1.0 + std::abs(c * base.tau_left)));
                ASSERT_NEAR(scaled.tau_right, c * base.tau_right, 1e-9 * (1.0 + std::abs(c * base.tau_right)));
            }
        }
    }
}

TEST_F(RenderProperties, QuantizationBoundAndIdempotence) {
    for (int counts : {500, 2000, 4096}) {
        PlantParams plant;
        plant.encoder_counts_per_rev = counts;
        for (int i = 0; i < 10000; ++i) {
            const double theta = std::uniform_real_distribution<double>(-720.0, 720.0)(gen);
            const double q = quantize_angle(theta, plant);
            ASSERT_LT(std::abs(q - theta), plant.quantum());
            ASSERT_LE(std::abs(q), std::abs(theta));
            ASSERT_TRUE(q == 0.0 || std::signbit(q) == std::signbit(theta));
            ASSERT_EQ(quantize_angle(q, plant), q);
        }
    }
}

TEST_F(RenderProperties, SaturationIsBoundedAndIdempotent) {
    const PlantParams plant;
    std::uniform_real_distribution<double> torque(-2000.0, 2000.0);
    for (int i = 0; i < 10000; ++i) {
        const TorqueCommand raw{torque(gen), torque(gen)};
        const auto once = saturate(raw, plant);
        ASSERT_LE(std::abs(once.tau_left), plant.tau_max);
        ASSERT_LE(std::abs(once.tau_right), plant.tau_max);
        ASSERT_EQ(saturate(once, plant), once);
        if (std::abs(raw.tau_left) <= plant.tau_max) ASSERT_EQ(once.tau_left, raw.tau_left);
    }
}

} // namespace
} // namespace stiffjnd
