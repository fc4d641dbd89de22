#pragma once

#include <array>
#include <variant>
#include <vector>

#include "stiffjnd/random.hpp"
#include "stiffjnd/spring_render.hpp"
#include "stiffjnd/staircase.hpp"

namespace stiffjnd {

enum class Interval { First, Second };

const char* to_string(Interval interval);

constexpr Interval other(Interval interval) noexcept {
    return interval == Interval::First ? Interval::Second : Interval::First;
}

/// Weibull 2AFC observer on the scale axis:
///   P(correct | s) = 0.5 + (0.5 - lapse) * (1 - exp(-((s - 1) / alpha)^beta))
struct PsychometricObserver {
    double alpha = 0.15;
    double beta = 3.0;
    double lapse = 0.0;

    std::vector<Violation> violations() const;
};

/// Single pronate-and-return excursion with a minimum-jerk profile on each
/// half. Starts and ends at exactly 0 deg.
struct ExplorationTrajectory {
    double amplitude = 40.0;  ///< deg
    double duration = 2.0;    ///< s

    /// Angle at each control tick, round(duration * tick_rate) + 1 samples.
    std::vector<double> sample(double tick_rate) const;

    std::vector<Violation> violations() const;
};

/// Observer that explores each spring through the plant, estimates its
/// stiffness by regression, and perturbs the estimate with lognormal noise.
struct EmbodiedObserver {
    double weber_fraction = 0.15;
    double lapse = 0.0;
    ExplorationTrajectory trajectory;
    std::array<double, 7> per_condition_noise_scale{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

    double noise_sigma(ConditionMode mode) const noexcept {
        return weber_fraction * per_condition_noise_scale[condition_index(mode)];
    }

    std::vector<Violation> violations() const;
};

/// Scripted observer that is always right or always wrong.
struct FixedResponseObserver {
    bool always_correct = true;
};

using Observer = std::variant<PsychometricObserver, EmbodiedObserver, FixedResponseObserver>;

/// Throws InvalidInputError for s < 1.
double p_correct(const PsychometricObserver& obs, double scale);

bool decide_trial_psychometric(const PsychometricObserver& obs, double scale, Rng& rng);

/// Wrists that follow the trajectory in each condition; the others hold 0.
struct ActiveWrists {
    bool left = false;
    bool right = false;
};
ActiveWrists active_wrists(ConditionMode mode) noexcept;

/// Noise-free slope (mNm/deg) of felt torque on rendered displacement from
/// one tick-by-tick exploration. Throws DegenerateExplorationError when no
/// sample exceeds one encoder quantum.
double regress_stiffness(const ExplorationTrajectory& trajectory, ConditionMode mode,
                         const SpringParams& spring, const PlantParams& plant);

/// regress_stiffness times exp(sigma * N(0, 1)), sigma = noise_sigma(mode).
double explore_and_estimate(const EmbodiedObserver& obs, ConditionMode mode, const SpringParams& spring,
                            const PlantParams& plant, Rng& rng);

/// Which interval felt stiffer. Lapses answer uniformly; exact ties are
/// broken uniformly.
Interval decide_trial_embodied(const EmbodiedObserver& obs, ConditionMode mode, const SpringParams& first,
                               const SpringParams& second, const PlantParams& plant, Rng& rng);

} // namespace stiffjnd
