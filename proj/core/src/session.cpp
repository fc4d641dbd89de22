#include "stiffjnd/session.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stiffjnd/error.hpp"

namespace stiffjnd {

std::vector<Violation> SessionSettings::violations() const {
    std::vector<Violation> out;
    if (!(reference_kappa > 0.0) || !std::isfinite(reference_kappa)) {
        out.push_back({"session.reference_kappa", fmt::format("must be > 0, got {}", reference_kappa)});
    }
    if (max_trials < 1) {
        out.push_back({"session.max_trials", fmt::format("must be >= 1, got {}", max_trials)});
    }
    if (!(break_duration_s >= 0.0) || !std::isfinite(break_duration_s)) {
        out.push_back({"session.break_duration_s", fmt::format("must be >= 0, got {}", break_duration_s)});
    }
    return out;
}

namespace {

void append_plant_violations(std::vector<Violation>& out, const PlantParams& plant) {
    if (!(plant.tau_max > 0.0) || !std::isfinite(plant.tau_max)) {
        out.push_back({"plant.tau_max", fmt::format("must be > 0, got {}", plant.tau_max)});
    }
    if (plant.encoder_counts_per_rev <= 0) {
        out.push_back({"plant.encoder_counts_per_rev",
                       fmt::format("must be > 0, got {}", plant.encoder_counts_per_rev)});
    }
    if (!(plant.tick_rate > 0.0) || !std::isfinite(plant.tick_rate)) {
        out.push_back({"plant.tick_rate", fmt::format("must be > 0, got {}", plant.tick_rate)});
    }
}

struct ObserverViolations {
    std::vector<Violation> operator()(const PsychometricObserver& o) const { return o.violations(); }
    std::vector<Violation> operator()(const EmbodiedObserver& o) const { return o.violations(); }
    std::vector<Violation> operator()(const FixedResponseObserver&) const { return {}; }
};

template <typename T>
void append(std::vector<Violation>& out, const std::vector<T>& more) {
    out.insert(out.end(), more.begin(), more.end());
}

} // namespace

std::vector<Violation> ProtocolConfig::violations() const {
    std::vector<Violation> out;
    append_plant_violations(out, plant);
    append(out, staircase.violations());
    append(out, std::visit(ObserverViolations{}, observer));
    append(out, session.violations());
    return out;
}

const ConditionOutcome& SessionResult::outcome(ConditionMode mode) const {
    for (const auto& c : conditions) {
        if (c.condition == mode) return c;
    }
    throw InvalidInputError(fmt::format("session has no outcome for {}", to_string(mode)));
}

namespace {

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace

SessionPlan plan_session(std::uint64_t seed, const ProtocolConfig& config) {
    Rng rng(derive_seed(seed, 0));
    SessionPlan plan;
    plan.seed = seed;
    plan.config = config;

    if (config.session.shuffle_all_conditions) {
        plan.condition_order.assign(kAllConditions.begin(), kAllConditions.end());
        shuffle_in_place(plan.condition_order, rng);
        return plan;
    }

    std::vector<int> modes{1, 2, 3, 4};
    shuffle_in_place(modes, rng);
    for (int mode : modes) {
        switch (mode) {
        case 1: plan.condition_order.push_back(ConditionMode::C1); break;
        case 2:
        case 3:
        case 4: {
            const auto left = static_cast<ConditionMode>(1 + 2 * (mode - 2));
            const bool left_first = rng.bernoulli(0.5);
            plan.condition_order.push_back(left_first ? left : mirror(left));
            plan.condition_order.push_back(left_first ? mirror(left) : left);
            break;
        }
        }
    }
    return plan;
}

Rng condition_rng(std::uint64_t seed, ConditionMode mode) {
    return Rng(derive_seed(seed, 1 + condition_index(mode)));
}

namespace {

struct ChoiceVisitor {
    ConditionMode condition;
    Interval test_interval;
    double s_test;
    const ProtocolConfig& config;
    Rng& rng;

    Interval operator()(const PsychometricObserver& obs) const {
        const bool correct = decide_trial_psychometric(obs, s_test, rng);
        return correct ? test_interval : other(test_interval);
    }

    Interval operator()(const EmbodiedObserver& obs) const {
        const SpringParams test{s_test, config.session.reference_kappa};
        const SpringParams reference{1.0, config.session.reference_kappa};
        const bool test_first = test_interval == Interval::First;
        return decide_trial_embodied(obs, condition, test_first ? test : reference, test_first ? reference : test,
                                     config.plant, rng);
    }

    Interval operator()(const FixedResponseObserver& obs) const {
        return obs.always_correct ? test_interval : other(test_interval);
    }
};

} // namespace

TrialOutcome run_trial(ConditionMode condition, const StaircaseState& state, const ProtocolConfig& config,
                       Rng& rng) {
    if (is_terminated(state, config.staircase)) {
        throw ProtocolError(fmt::format("trial requested on a terminated staircase ({})", to_string(condition)));
    }

    TrialOutcome out;
    TrialRecord& rec = out.record;
    rec.condition = condition;
    rec.trial_index = state.trial_count + 1;
    rec.s_test = state.current_scale;
    rec.test_interval = rng.bernoulli(0.5) ? Interval::First : Interval::Second;
    out.cues = {AudioCue{condition, rec.trial_index, Interval::First},
                AudioCue{condition, rec.trial_index, Interval::Second}};

    rec.response = std::visit(ChoiceVisitor{condition, rec.test_interval, rec.s_test, config, rng}, config.observer);
    rec.correct = rec.response == rec.test_interval;

    out.state = update(state, rec.correct, config.staircase);
    rec.scale_after = out.state.current_scale;
    rec.reversal = out.state.last_event.reversal;
    rec.step_pair_active = out.state.last_event.phase;
    return out;
}

ConditionOutcome run_condition(ConditionMode condition, const ProtocolConfig& config, Rng& rng) {
    ConditionOutcome out;
    out.condition = condition;
    StaircaseState state = init(config.staircase);

    while (!is_terminated(state, config.staircase) && state.trial_count < config.session.max_trials) {
        TrialOutcome trial = run_trial(condition, state, config, rng);
        out.log.emplace_back(trial.cues[0]);
        out.log.emplace_back(trial.cues[1]);
        out.log.emplace_back(trial.record);
        out.trials.push_back(trial.record);
        state = std::move(trial.state);
    }

    out.converged = is_terminated(state, config.staircase);
    ConditionFinished finished{condition, out.converged, state.trial_count, std::nullopt, {}};
    if (out.converged) {
        out.jnd = compute_jnd(state, config.staircase);
        finished.jnd_percent = out.jnd->jnd_percent;
        finished.reversal_scales_used = out.jnd->reversal_scales_used;
    }
    out.log.emplace_back(std::move(finished));
    out.final_state = std::move(state);
    return out;
}

SessionResult run_session(const SessionPlan& plan) {
    const auto problems = plan.config.violations();
    if (!problems.empty()) {
        throw ConfigError(fmt::format("invalid session config: {} {}", problems.front().field,
                                      problems.front().message));
    }

    SessionResult result;
    result.seed = plan.seed;
    result.config = plan.config;
    result.condition_order = plan.condition_order;

    for (std::size_t i = 0; i < plan.condition_order.size(); ++i) {
        const ConditionMode mode = plan.condition_order[i];
        result.log.emplace_back(ConditionStarted{mode, static_cast<int>(i)});

        Rng rng = condition_rng(plan.seed, mode);
        ConditionOutcome outcome = run_condition(mode, plan.config, rng);
        result.log.insert(result.log.end(), outcome.log.begin(), outcome.log.end());

        if (i + 1 < plan.condition_order.size()) {
            result.log.emplace_back(BreakTaken{mode, plan.config.session.break_duration_s});
        }
        result.conditions.push_back(std::move(outcome));
    }
    return result;
}

} // namespace stiffjnd
