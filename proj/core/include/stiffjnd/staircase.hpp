#pragma once

#include <string>
#include <vector>

namespace stiffjnd {

/// Field-level invariant failure; `field` is a dotted config path.
struct Violation {
    std::string field;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// 1-up-3-down transformed weighted staircase on the test-spring scale
/// factor. Steps are additive in units of the reference stiffness.
struct StaircaseConfig {
    double start_scale = 1.50;
    double up_step_initial = 0.10;
    double down_step_initial = 0.0732;
    double up_step_late = 0.05;
    double down_step_late = 0.0366;
    int step_change_after_reversals = 2;
    int terminate_after_reversals = 10;
    int jnd_window_reversals = 8;
    double floor_scale = 1.0;

    /// All invariant failures, named "staircase.<field>".
    std::vector<Violation> violations() const;
};

enum class Direction { None, Up, Down };

enum class StepPhase { Initial, Late };

const char* to_string(Direction direction);
const char* to_string(StepPhase phase);

struct Reversal {
    double scale = 0.0;          ///< scale presented on the reversing trial
    Direction new_direction = Direction::None;
    int trial = 0;               ///< 1-based trial count at which it occurred

    friend bool operator==(const Reversal&, const Reversal&) = default;
};

/// What the most recent update did.
struct StepEvent {
    bool stepped = false;
    bool reversal = false;
    StepPhase phase = StepPhase::Initial;  ///< step pair active for this response

    friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

/// Immutable staircase state; update() returns a successor.
struct StaircaseState {
    double current_scale = 0.0;
    int consecutive_correct = 0;  ///< 0..2
    Direction last_direction = Direction::None;
    std::vector<Reversal> reversals;
    int trial_count = 0;
    StepEvent last_event;

    std::vector<double> reversal_scales() const;

    friend bool operator==(const StaircaseState&, const StaircaseState&) = default;
};

struct JndEstimate {
    double jnd_percent = 0.0;
    std::vector<double> reversal_scales_used;
};

/// Throws ConfigError listing every violation.
StaircaseState init(const StaircaseConfig& config);

/// Step pair in force given `reversal_count` reversals so far.
StepPhase step_phase(int reversal_count, const StaircaseConfig& config) noexcept;

/// Applies one response. Correct responses accumulate until the third in a
/// row, which steps down; any incorrect response steps up. A change of step
/// direction records a reversal at the pre-step scale, and the reversal
/// count (including one just recorded) selects the step pair. The scale is
/// clamped at floor_scale. Throws ProtocolError once terminated.
StaircaseState update(const StaircaseState& state, bool correct, const StaircaseConfig& config);
StaircaseState update(StaircaseState&& state, bool correct, const StaircaseConfig& config);

bool is_terminated(const StaircaseState& state, const StaircaseConfig& config) noexcept;

/// Mean of the last jnd_window_reversals reversal scales, as percent above
/// the reference. Throws ProtocolError before termination.
JndEstimate compute_jnd(const StaircaseState& state, const StaircaseConfig& config);

/// Proportion correct p with zero expected drift for a 1-up-3-down rule
/// with additive steps: p^3 = up / (up + down).
double equilibrium_proportion(double up_step, double down_step);

/// Equilibrium for the config's initial step pair.
double equilibrium_proportion(const StaircaseConfig& config);

} // namespace stiffjnd
