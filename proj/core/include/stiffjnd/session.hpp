#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "stiffjnd/observer.hpp"
#include "stiffjnd/random.hpp"
#include "stiffjnd/spring_render.hpp"
#include "stiffjnd/staircase.hpp"

namespace stiffjnd {

struct SessionSettings {
    double reference_kappa = 1.5;  ///< mNm/deg
    int max_trials = 400;          ///< per-condition guard
    bool shuffle_all_conditions = false;
    double break_duration_s = 300.0;

    std::vector<Violation> violations() const;
};

/// Everything a session needs besides its seed.
struct ProtocolConfig {
    PlantParams plant;
    StaircaseConfig staircase;
    Observer observer = PsychometricObserver{};
    SessionSettings session;

    std::vector<Violation> violations() const;
};

struct SessionPlan {
    std::vector<ConditionMode> condition_order;
    std::uint64_t seed = 0;
    ProtocolConfig config;
};

/// One two-interval forced-choice trial.
struct TrialRecord {
    ConditionMode condition = ConditionMode::C1;
    int trial_index = 0;  ///< 1-based within the condition
    double s_test = 1.0;
    Interval test_interval = Interval::First;
    Interval response = Interval::First;
    bool correct = false;
    double scale_after = 1.0;
    bool reversal = false;
    StepPhase step_pair_active = StepPhase::Initial;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct AudioCue {
    ConditionMode condition = ConditionMode::C1;
    int trial_index = 0;
    Interval interval = Interval::First;  ///< "interval 1" or "interval 2"

    friend bool operator==(const AudioCue&, const AudioCue&) = default;
};

struct ConditionStarted {
    ConditionMode condition = ConditionMode::C1;
    int position = 0;  ///< 0-based index in the session order

    friend bool operator==(const ConditionStarted&, const ConditionStarted&) = default;
};

struct ConditionFinished {
    ConditionMode condition = ConditionMode::C1;
    bool converged = false;
    int trials = 0;
    std::optional<double> jnd_percent;
    std::vector<double> reversal_scales_used;

    friend bool operator==(const ConditionFinished&, const ConditionFinished&) = default;
};

/// Inter-condition rest, logged rather than waited out.
struct BreakTaken {
    ConditionMode after = ConditionMode::C1;
    double duration_s = 0.0;

    friend bool operator==(const BreakTaken&, const BreakTaken&) = default;
};

using SessionEvent = std::variant<ConditionStarted, AudioCue, TrialRecord, ConditionFinished, BreakTaken>;

struct TrialOutcome {
    TrialRecord record;
    StaircaseState state;
    std::array<AudioCue, 2> cues;
};

struct ConditionOutcome {
    ConditionMode condition = ConditionMode::C1;
    bool converged = false;
    std::optional<JndEstimate> jnd;  ///< empty when the max-trials guard tripped
    std::vector<TrialRecord> trials;
    StaircaseState final_state;
    std::vector<SessionEvent> log;
};

struct SessionResult {
    std::uint64_t seed = 0;
    ProtocolConfig config;
    std::vector<ConditionMode> condition_order;
    std::vector<ConditionOutcome> conditions;  ///< in presentation order
    std::vector<SessionEvent> log;

    const ConditionOutcome& outcome(ConditionMode mode) const;
};

/// Presentation order for one session. By default the four exploration
/// modes are permuted and each L/R pair is kept adjacent in random internal
/// order; with shuffle_all_conditions all seven are permuted freely.
SessionPlan plan_session(std::uint64_t seed, const ProtocolConfig& config);

/// Generator for one condition's trials; independent of presentation order.
Rng condition_rng(std::uint64_t seed, ConditionMode mode);

/// Presents reference (s = 1) and test (s = current scale) in random order,
/// scores the observer's choice and advances the staircase.
TrialOutcome run_trial(ConditionMode condition, const StaircaseState& state, const ProtocolConfig& config,
                       Rng& rng);

/// Runs trials until the staircase terminates or max_trials is reached.
ConditionOutcome run_condition(ConditionMode condition, const ProtocolConfig& config, Rng& rng);

SessionResult run_session(const SessionPlan& plan);

} // namespace stiffjnd
