#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace stiffjnd {

/// The seven presentation conditions. C2-C4 are L/R mirror pairs.
enum class ConditionMode { C1, C2L, C2R, C3L, C3R, C4L, C4R };

inline constexpr std::array<ConditionMode, 7> kAllConditions = {
    ConditionMode::C1,  ConditionMode::C2L, ConditionMode::C2R, ConditionMode::C3L,
    ConditionMode::C3R, ConditionMode::C4L, ConditionMode::C4R,
};

std::string_view to_string(ConditionMode mode);
std::optional<ConditionMode> parse_condition(std::string_view name);

/// Exploration mode 1..4 of a condition (C3L -> 3).
int exploration_mode(ConditionMode mode);

/// The L/R counterpart; C1 maps to itself.
ConditionMode mirror(ConditionMode mode);

/// Dense index 0..6 in kAllConditions order.
constexpr std::size_t condition_index(ConditionMode mode) noexcept {
    return static_cast<std::size_t>(mode);
}

struct SpringParams {
    double scale = 1.0;  ///< s; 1 for the reference spring, >= 1 for a test spring
    double kappa = 1.5;  ///< mNm/deg

    /// Throws InvalidInputError unless scale >= 1, kappa > 0, both finite.
    void validate() const;
};

/// Angular displacement from neutral, deg. Positive is pronation.
struct WristState {
    double theta_left = 0.0;
    double theta_right = 0.0;
};

/// mNm on each wrist.
struct TorqueCommand {
    double tau_left = 0.0;
    double tau_right = 0.0;

    friend bool operator==(const TorqueCommand&, const TorqueCommand&) = default;
};

/// Device plant: peak torque, quadrature encoder resolution, loop rate.
struct PlantParams {
    double tau_max = 467.0;              ///< mNm
    int encoder_counts_per_rev = 2000;   ///< 500 CPT x4 quadrature
    double tick_rate = 1000.0;           ///< Hz

    /// Angle of one encoder count, deg.
    double quantum() const noexcept { return 360.0 / encoder_counts_per_rev; }

    void validate() const;
};

/// Unsaturated torques for one condition:
///   C1:  tau_L = tau_R = s*k*(theta_L + theta_R)
///   C2L: tau_L = s*k*theta_L, tau_R = 0
///   C3L: tau_L = tau_R = s*k*theta_R
///   C4L: tau_R = s*k*(theta_L + theta_R), tau_L = 0
/// with the R variants mirrored. Throws InvalidInputError on non-finite
/// angles or an invalid spring.
TorqueCommand render_torques(ConditionMode mode, const SpringParams& spring, const WristState& wrists);

/// Symmetric clamp of each component to [-tau_max, tau_max].
TorqueCommand saturate(const TorqueCommand& raw, const PlantParams& plant) noexcept;

/// Largest multiple of the encoder quantum with magnitude <= |theta| and
/// the sign of theta (truncation toward zero).
double quantize_angle(double theta, const PlantParams& plant);

/// One control tick: quantize both angles, render, saturate.
TorqueCommand tick(ConditionMode mode, const SpringParams& spring, const WristState& wrists,
                   const PlantParams& plant);

} // namespace stiffjnd
