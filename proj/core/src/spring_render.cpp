#include "stiffjnd/spring_render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "stiffjnd/error.hpp"

namespace stiffjnd {

namespace {

constexpr std::array<std::string_view, 7> kNames = {"C1", "C2L", "C2R", "C3L", "C3R", "C4L", "C4R"};

} // namespace

std::string_view to_string(ConditionMode mode) { return kNames[condition_index(mode)]; }

std::optional<ConditionMode> parse_condition(std::string_view name) {
    for (ConditionMode mode : kAllConditions) {
        if (to_string(mode) == name) return mode;
    }
    return std::nullopt;
}

int exploration_mode(ConditionMode mode) {
    switch (mode) {
    case ConditionMode::C1: return 1;
    case ConditionMode::C2L:
    case ConditionMode::C2R: return 2;
    case ConditionMode::C3L:
    case ConditionMode::C3R: return 3;
    case ConditionMode::C4L:
    case ConditionMode::C4R: return 4;
    }
    return 0;
}

ConditionMode mirror(ConditionMode mode) {
    switch (mode) {
    case ConditionMode::C1: return ConditionMode::C1;
    case ConditionMode::C2L: return ConditionMode::C2R;
    case ConditionMode::C2R: return ConditionMode::C2L;
    case ConditionMode::C3L: return ConditionMode::C3R;
    case ConditionMode::C3R: return ConditionMode::C3L;
    case ConditionMode::C4L: return ConditionMode::C4R;
    case ConditionMode::C4R: return ConditionMode::C4L;
    }
    return mode;
}

void SpringParams::validate() const {
    if (!std::isfinite(scale) || scale < 1.0) {
        throw InvalidInputError(fmt::format("spring scale must be finite and >= 1, got {}", scale));
    }
    if (!std::isfinite(kappa) || kappa <= 0.0) {
        throw InvalidInputError(fmt::format("spring kappa must be finite and > 0, got {}", kappa));
    }
}

void PlantParams::validate() const {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
        throw InvalidInputError(fmt::format("plant tau_max must be > 0, got {}", tau_max));
    }
    if (encoder_counts_per_rev <= 0) {
        throw InvalidInputError(
            fmt::format("plant encoder_counts_per_rev must be > 0, got {}", encoder_counts_per_rev));
    }
    if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) {
        throw InvalidInputError(fmt::format("plant tick_rate must be > 0, got {}", tick_rate));
    }
}

TorqueCommand render_torques(ConditionMode mode, const SpringParams& spring, const WristState& wrists) {
    if (!std::isfinite(wrists.theta_left) || !std::isfinite(wrists.theta_right)) {
        throw InvalidInputError("wrist displacement must be finite");
    }
    spring.validate();

    const double s = spring.scale;
    const double k = spring.kappa;
    const double left = wrists.theta_left;
    const double right = wrists.theta_right;

    switch (mode) {
    case ConditionMode::C1: {
        const double tau = s * k * (left + right);
        return {tau, tau};
    }
    case ConditionMode::C2L: return {s * k * left, 0.0};
    case ConditionMode::C2R: return {0.0, s * k * right};
    case ConditionMode::C3L: {
        // left wrist held at neutral; its displacement is not rendered
        const double tau = s * k * right;
        return {tau, tau};
    }
    case ConditionMode::C3R: {
        const double tau = s * k * left;
        return {tau, tau};
    }
    case ConditionMode::C4L: return {0.0, s * k * (left + right)};
    case ConditionMode::C4R: return {s * k * (left + right), 0.0};
    }
    throw InvalidInputError("unknown condition mode");
}

TorqueCommand saturate(const TorqueCommand& raw, const PlantParams& plant) noexcept {
    return {std::clamp(raw.tau_left, -plant.tau_max, plant.tau_max),
            std::clamp(raw.tau_right, -plant.tau_max, plant.tau_max)};
}

double quantize_angle(double theta, const PlantParams& plant) {
    if (!std::isfinite(theta)) throw InvalidInputError("angle must be finite");
    const double q = plant.quantum();
    const double magnitude = std::abs(theta);

    // Division can land one count off in either direction; settle the count
    // with the same product the result is built from so that re-quantizing
    // a quantized angle reproduces it exactly.
    auto counts = static_cast<long long>(magnitude / q);
    while (static_cast<double>(counts + 1) * q <= magnitude) ++counts;
    while (counts > 0 && static_cast<double>(counts) * q > magnitude) --counts;

    return std::copysign(static_cast<double>(counts) * q, theta);
}

TorqueCommand tick(ConditionMode mode, const SpringParams& spring, const WristState& wrists,
                   const PlantParams& plant) {
    const WristState felt{quantize_angle(wrists.theta_left, plant), quantize_angle(wrists.theta_right, plant)};
    return saturate(render_torques(mode, spring, felt), plant);
}

} // namespace stiffjnd
