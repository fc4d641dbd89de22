#include "stiffjnd/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "stiffjnd/error.hpp"

namespace stiffjnd {

std::vector<Violation> StaircaseConfig::violations() const {
    std::vector<Violation> out;
    auto positive_step = [&](const char* name, double value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            out.push_back({fmt::format("staircase.{}", name), fmt::format("must be > 0, got {}", value)});
        }
    };
    positive_step("up_step_initial", up_step_initial);
    positive_step("down_step_initial", down_step_initial);
    positive_step("up_step_late", up_step_late);
    positive_step("down_step_late", down_step_late);

    if (!std::isfinite(floor_scale) || floor_scale < 1.0) {
        out.push_back({"staircase.floor_scale", fmt::format("must be >= 1, got {}", floor_scale)});
    }
    if (!std::isfinite(start_scale) || start_scale < floor_scale) {
        out.push_back({"staircase.start_scale",
                       fmt::format("must be >= floor_scale ({}), got {}", floor_scale, start_scale)});
    }
    if (step_change_after_reversals < 0) {
        out.push_back({"staircase.step_change_after_reversals",
                       fmt::format("must be >= 0, got {}", step_change_after_reversals)});
    }
    if (terminate_after_reversals < 1) {
        out.push_back({"staircase.terminate_after_reversals",
                       fmt::format("must be >= 1, got {}", terminate_after_reversals)});
    }
    if (jnd_window_reversals < 1 || jnd_window_reversals > terminate_after_reversals) {
        out.push_back({"staircase.jnd_window_reversals",
                       fmt::format("must be in [1, terminate_after_reversals ({})], got {}",
                                   terminate_after_reversals, jnd_window_reversals)});
    }
    return out;
}

const char* to_string(Direction direction) {
    switch (direction) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::None: break;
    }
    return "none";
}

const char* to_string(StepPhase phase) { return phase == StepPhase::Late ? "late" : "initial"; }

std::vector<double> StaircaseState::reversal_scales() const {
    std::vector<double> out;
    out.reserve(reversals.size());
    for (const auto& r : reversals) out.push_back(r.scale);
    return out;
}

StaircaseState init(const StaircaseConfig& config) {
    const auto problems = config.violations();
    if (!problems.empty()) {
        std::string msg = "invalid staircase config:";
        for (const auto& v : problems) msg += fmt::format(" {} {};", v.field, v.message);
        throw ConfigError(msg);
    }
    StaircaseState state;
    state.current_scale = config.start_scale;
    state.last_event.phase = step_phase(0, config);
    return state;
}

StepPhase step_phase(int reversal_count, const StaircaseConfig& config) noexcept {
    return reversal_count >= config.step_change_after_reversals ? StepPhase::Late : StepPhase::Initial;
}

StaircaseState update(const StaircaseState& state, bool correct, const StaircaseConfig& config) {
    return update(StaircaseState(state), correct, config);
}

StaircaseState update(StaircaseState&& state, bool correct, const StaircaseConfig& config) {
    if (is_terminated(state, config)) {
        throw ProtocolError(fmt::format("staircase already terminated after {} reversals", state.reversals.size()));
    }

    StaircaseState next = std::move(state);
    next.trial_count += 1;
    next.last_event = StepEvent{};

    Direction step = Direction::None;
    if (!correct) {
        step = Direction::Up;
    } else if (next.consecutive_correct + 1 >= 3) {
        step = Direction::Down;
    }

    if (step == Direction::None) {
        next.consecutive_correct += 1;
        next.last_event.phase = step_phase(static_cast<int>(next.reversals.size()), config);
        return next;
    }

    const double before = next.current_scale;
    if (next.last_direction != Direction::None && next.last_direction != step) {
        next.reversals.push_back({before, step, next.trial_count});
        next.last_event.reversal = true;
    }

    const StepPhase phase = step_phase(static_cast<int>(next.reversals.size()), config);
    const bool late = phase == StepPhase::Late;
    const double delta = step == Direction::Up ? (late ? config.up_step_late : config.up_step_initial)
                                               : -(late ? config.down_step_late : config.down_step_initial);

    next.current_scale = std::max(config.floor_scale, before + delta);
    next.consecutive_correct = 0;
    next.last_direction = step;
    next.last_event.stepped = true;
    next.last_event.phase = phase;
    return next;
}

bool is_terminated(const StaircaseState& state, const StaircaseConfig& config) noexcept {
    return static_cast<int>(state.reversals.size()) >= config.terminate_after_reversals;
}

JndEstimate compute_jnd(const StaircaseState& state, const StaircaseConfig& config) {
    if (!is_terminated(state, config)) {
        throw ProtocolError(fmt::format("JND requested after {} of {} reversals", state.reversals.size(),
                                        config.terminate_after_reversals));
    }
    JndEstimate out;
    const auto window = static_cast<std::size_t>(config.jnd_window_reversals);
    const auto first = state.reversals.end() - static_cast<std::ptrdiff_t>(window);
    for (auto it = first; it != state.reversals.end(); ++it) out.reversal_scales_used.push_back(it->scale);

    const double mean =
        std::accumulate(out.reversal_scales_used.begin(), out.reversal_scales_used.end(), 0.0) /
        static_cast<double>(window);
    out.jnd_percent = (mean - 1.0) * 100.0;
    return out;
}

double equilibrium_proportion(double up_step, double down_step) {
    return std::cbrt(up_step / (up_step + down_step));
}

double equilibrium_proportion(const StaircaseConfig& config) {
    return equilibrium_proportion(config.up_step_initial, config.down_step_initial);
}

} // namespace stiffjnd
