#include "stiffjnd/session_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "internal/json_config.hpp"
#include "stiffjnd/error.hpp"

namespace stiffjnd {

using json = nlohmann::ordered_json;

namespace {

json to_json(const ConditionStarted& e) {
    return json{{"type", "condition_start"}, {"condition", to_string(e.condition)}, {"position", e.position}};
}

json to_json(const AudioCue& e) {
    return json{{"type", "audio_cue"},
                {"condition", to_string(e.condition)},
                {"trial_index", e.trial_index},
                {"cue", e.interval == Interval::First ? "interval 1" : "interval 2"}};
}

json to_json(const TrialRecord& r) {
    return json{{"type", "trial"},
                {"condition", to_string(r.condition)},
                {"trial_index", r.trial_index},
                {"s_test", r.s_test},
                {"test_interval", to_string(r.test_interval)},
                {"response", to_string(r.response)},
                {"correct", r.correct},
                {"scale_after", r.scale_after},
                {"reversal", r.reversal},
                {"step_pair_active", to_string(r.step_pair_active)}};
}

json to_json(const ConditionFinished& e) {
    json j{{"type", "condition_end"},
           {"condition", to_string(e.condition)},
           {"converged", e.converged},
           {"trials", e.trials}};
    j["jnd_percent"] = e.jnd_percent ? json(*e.jnd_percent) : json(nullptr);
    j["reversal_scales_used"] = e.reversal_scales_used;
    return j;
}

json to_json(const BreakTaken& e) {
    return json{{"type", "break"}, {"after_condition", to_string(e.after)}, {"duration_s", e.duration_s}};
}

ConditionMode condition_field(const json& j, const char* key) {
    const auto name = j.at(key).get<std::string>();
    const auto mode = parse_condition(name);
    if (!mode) throw ConfigError(fmt::format("unknown condition \"{}\" in log", name));
    return *mode;
}

Interval interval_field(const json& j, const char* key) {
    const auto name = j.at(key).get<std::string>();
    if (name == "first") return Interval::First;
    if (name == "second") return Interval::Second;
    throw ConfigError(fmt::format("unknown interval \"{}\" in log", name));
}

SessionEvent event_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "condition_start") {
        return ConditionStarted{condition_field(j, "condition"), j.at("position").get<int>()};
    }
    if (type == "audio_cue") {
        const auto cue = j.at("cue").get<std::string>();
        if (cue != "interval 1" && cue != "interval 2") throw ConfigError(fmt::format("unknown cue \"{}\"", cue));
        return AudioCue{condition_field(j, "condition"), j.at("trial_index").get<int>(),
                        cue == "interval 1" ? Interval::First : Interval::Second};
    }
    if (type == "trial") {
        TrialRecord r;
        r.condition = condition_field(j, "condition");
        r.trial_index = j.at("trial_index").get<int>();
        r.s_test = j.at("s_test").get<double>();
        r.test_interval = interval_field(j, "test_interval");
        r.response = interval_field(j, "response");
        r.correct = j.at("correct").get<bool>();
        r.scale_after = j.at("scale_after").get<double>();
        r.reversal = j.at("reversal").get<bool>();
        r.step_pair_active = j.at("step_pair_active").get<std::string>() == "late" ? StepPhase::Late : StepPhase::Initial;
        return r;
    }
    if (type == "condition_end") {
        ConditionFinished e;
        e.condition = condition_field(j, "condition");
        e.converged = j.at("converged").get<bool>();
        e.trials = j.at("trials").get<int>();
        if (!j.at("jnd_percent").is_null()) e.jnd_percent = j.at("jnd_percent").get<double>();
        e.reversal_scales_used = j.at("reversal_scales_used").get<std::vector<double>>();
        return e;
    }
    if (type == "break") {
        return BreakTaken{condition_field(j, "after_condition"), j.at("duration_s").get<double>()};
    }
    throw ConfigError(fmt::format("unknown log record type \"{}\"", type));
}

} // namespace

std::string event_json(const SessionEvent& event) {
    return std::visit([](const auto& e) { return to_json(e).dump(); }, event);
}

std::string session_log_jsonl(const SessionResult& result) {
    json header{{"type", "session"}, {"schema_version", kLogSchemaVersion}, {"seed", result.seed}};
    json order = json::array();
    for (ConditionMode mode : result.condition_order) order.push_back(to_string(mode));
    header["condition_order"] = std::move(order);
    header["config"] = internal::protocol_to_json(result.config);

    std::string out = header.dump();
    out += '\n';
    for (const auto& event : result.log) {
        out += event_json(event);
        out += '\n';
    }
    return out;
}

std::vector<TrialRecord> ParsedLog::trials(ConditionMode mode) const {
    std::vector<TrialRecord> out;
    for (const auto& event : events) {
        if (const auto* r = std::get_if<TrialRecord>(&event); r && r->condition == mode) out.push_back(*r);
    }
    return out;
}

const ConditionFinished* ParsedLog::finished(ConditionMode mode) const {
    for (const auto& event : events) {
        if (const auto* e = std::get_if<ConditionFinished>(&event); e && e->condition == mode) return e;
    }
    return nullptr;
}

ParsedLog parse_session_log(std::string_view text) {
    ParsedLog log;
    bool have_header = false;
    std::size_t line_no = 0;

    while (!text.empty()) {
        const auto end = text.find('\n');
        const std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        ++line_no;
        if (line.empty()) continue;

        try {
            const json j = json::parse(line.begin(), line.end());
            if (!have_header) {
                if (j.at("type").get<std::string>() != "session") throw ConfigError("first record is not a session header");
                if (j.at("schema_version").get<int>() != kLogSchemaVersion) {
                    throw ConfigError(fmt::format("unsupported log schema_version {}", j.at("schema_version").dump()));
                }
                log.seed = j.at("seed").get<std::uint64_t>();
                for (const auto& name : j.at("condition_order")) {
                    const auto mode = parse_condition(name.get<std::string>());
                    if (!mode) throw ConfigError("unknown condition in header");
                    log.condition_order.push_back(*mode);
                }
                log.config = internal::protocol_from_json(j.at("config"));
                have_header = true;
                continue;
            }
            log.events.push_back(event_from_json(j));
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("log line {}: {}", line_no, e.what()));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("log line {}: {}", line_no, e.what()));
        }
    }
    if (!have_header) throw ConfigError("log has no session header");
    return log;
}

} // namespace stiffjnd
