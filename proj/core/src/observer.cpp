#include "stiffjnd/observer.hpp"

#include <cmath>

#include <fmt/format.h>

#include "stiffjnd/error.hpp"

namespace stiffjnd {

const char* to_string(Interval interval) { return interval == Interval::First ? "first" : "second"; }

namespace {

void check_lapse(std::vector<Violation>& out, const char* field, double lapse) {
    if (!(lapse >= 0.0 && lapse <= 0.1)) {
        out.push_back({field, fmt::format("must be in [0, 0.1], got {}", lapse)});
    }
}

// 10t^3 - 15t^4 + 6t^5
double minimum_jerk(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

} // namespace

std::vector<Violation> PsychometricObserver::violations() const {
    std::vector<Violation> out;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        out.push_back({"observer.alpha", fmt::format("must be > 0, got {}", alpha)});
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        out.push_back({"observer.beta", fmt::format("must be > 0, got {}", beta)});
    }
    check_lapse(out, "observer.lapse", lapse);
    return out;
}

std::vector<Violation> ExplorationTrajectory::violations() const {
    std::vector<Violation> out;
    if (!std::isfinite(amplitude) || amplitude == 0.0) {
        out.push_back({"observer.trajectory.amplitude", fmt::format("must be finite and non-zero, got {}", amplitude)});
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        out.push_back({"observer.trajectory.duration", fmt::format("must be > 0, got {}", duration)});
    }
    return out;
}

std::vector<Violation> EmbodiedObserver::violations() const {
    std::vector<Violation> out;
    if (!(weber_fraction > 0.0) || !std::isfinite(weber_fraction)) {
        out.push_back({"observer.weber_fraction", fmt::format("must be > 0, got {}", weber_fraction)});
    }
    check_lapse(out, "observer.lapse", lapse);
    for (ConditionMode mode : kAllConditions) {
        const double m = per_condition_noise_scale[condition_index(mode)];
        if (!(m > 0.0) || !std::isfinite(m)) {
            out.push_back({fmt::format("observer.per_condition_noise_scale.{}", to_string(mode)),
                           fmt::format("must be > 0, got {}", m)});
        }
    }
    auto traj = trajectory.violations();
    out.insert(out.end(), traj.begin(), traj.end());
    return out;
}

std::vector<double> ExplorationTrajectory::sample(double tick_rate) const {
    const auto ticks = static_cast<std::size_t>(std::llround(duration * tick_rate));
    std::vector<double> angles(ticks + 1, 0.0);
    if (ticks == 0) return angles;

    const double half = static_cast<double>(ticks) / 2.0;
    for (std::size_t i = 1; i < ticks; ++i) {
        const double t = static_cast<double>(i);
        angles[i] = t <= half ? amplitude * minimum_jerk(t / half)
                              : amplitude * (1.0 - minimum_jerk((t - half) / half));
    }
    return angles;
}

double p_correct(const PsychometricObserver& obs, double scale) {
    if (!(scale >= 1.0)) {
        throw InvalidInputError(fmt::format("psychometric scale must be >= 1, got {}", scale));
    }
    const double x = (scale - 1.0) / obs.alpha;
    return 0.5 + (0.5 - obs.lapse) * (1.0 - std::exp(-std::pow(x, obs.beta)));
}

bool decide_trial_psychometric(const PsychometricObserver& obs, double scale, Rng& rng) {
    return rng.bernoulli(p_correct(obs, scale));
}

ActiveWrists active_wrists(ConditionMode mode) noexcept {
    switch (mode) {
    case ConditionMode::C1:
    case ConditionMode::C4L:
    case ConditionMode::C4R: return {true, true};
    case ConditionMode::C2L:
    case ConditionMode::C3R: return {true, false};
    case ConditionMode::C2R:
    case ConditionMode::C3L: return {false, true};
    }
    return {};
}

namespace {

// Displacement that enters the condition's torque equation.
double rendered_displacement(ConditionMode mode, const WristState& felt) {
    switch (mode) {
    case ConditionMode::C2L:
    case ConditionMode::C3R: return felt.theta_left;
    case ConditionMode::C2R:
    case ConditionMode::C3L: return felt.theta_right;
    default: return felt.theta_left + felt.theta_right;
    }
}

// Torque on the wrist that receives feedback.
double felt_torque(ConditionMode mode, const TorqueCommand& cmd) {
    switch (mode) {
    case ConditionMode::C2L:
    case ConditionMode::C4R: return cmd.tau_left;
    case ConditionMode::C2R:
    case ConditionMode::C4L: return cmd.tau_right;
    default: return cmd.tau_left;  // C1, C3: both sides equal
    }
}

} // namespace

double regress_stiffness(const ExplorationTrajectory& trajectory, ConditionMode mode, const SpringParams& spring,
                         const PlantParams& plant) {
    const ActiveWrists active = active_wrists(mode);
    const double quantum = plant.quantum();

    double sxy = 0.0;
    double sxx = 0.0;
    std::size_t used = 0;
    for (double theta : trajectory.sample(plant.tick_rate)) {
        const WristState wrists{active.left ? theta : 0.0, active.right ? theta : 0.0};
        const TorqueCommand torque = tick(mode, spring, wrists, plant);
        const WristState felt{quantize_angle(wrists.theta_left, plant), quantize_angle(wrists.theta_right, plant)};
        const double x = rendered_displacement(mode, felt);
        if (std::abs(x) <= quantum) continue;
        const double y = felt_torque(mode, torque);
        sxy += x * y;
        sxx += x * x;
        ++used;
    }
    if (used == 0) {
        throw DegenerateExplorationError(fmt::format(
            "no exploration sample exceeded one encoder quantum ({} deg); amplitude {} deg", quantum,
            trajectory.amplitude));
    }
    return sxy / sxx;
}

double explore_and_estimate(const EmbodiedObserver& obs, ConditionMode mode, const SpringParams& spring,
                            const PlantParams& plant, Rng& rng) {
    const double slope = regress_stiffness(obs.trajectory, mode, spring, plant);
    return slope * std::exp(obs.noise_sigma(mode) * rng.normal());
}

Interval decide_trial_embodied(const EmbodiedObserver& obs, ConditionMode mode, const SpringParams& first,
                               const SpringParams& second, const PlantParams& plant, Rng& rng) {
    const double est_first = explore_and_estimate(obs, mode, first, plant, rng);
    const double est_second = explore_and_estimate(obs, mode, second, plant, rng);

    if (rng.bernoulli(obs.lapse) || est_first == est_second) {
        return rng.bernoulli(0.5) ? Interval::First : Interval::Second;
    }
    return est_first > est_second ? Interval::First : Interval::Second;
}

} // namespace stiffjnd
