#include "stiffjnd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "stiffjnd/error.hpp"
#include "internal/json_config.hpp"

namespace stiffjnd {

using json = nlohmann::ordered_json;

namespace {

// Typed view of one JSON object that rejects unknown keys.
class ObjectReader {
public:
    ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) throw ConfigError(fmt::format("{} must be an object", display()));
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        auto it = object_.find(key);
        if (it == object_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(fmt::format("{} has the wrong type", child(key)));
        }
    }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }

    std::string child(const char* key) const { return path_.empty() ? key : fmt::format("{}.{}", path_, key); }

    void reject_unknown() const {
        for (auto it = object_.begin(); it != object_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError(fmt::format("unknown field {}", child(it.key().c_str())));
            }
        }
    }

private:
    std::string display() const { return path_.empty() ? std::string("config") : path_; }

    const json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

json plant_json(const PlantParams& p) {
    return json{{"tau_max", p.tau_max}, {"encoder_counts_per_rev", p.encoder_counts_per_rev}, {"tick_rate", p.tick_rate}};
}

void read_plant(const json& j, PlantParams& p) {
    ObjectReader r(j, "plant");
    r.read("tau_max", p.tau_max);
    r.read("encoder_counts_per_rev", p.encoder_counts_per_rev);
    r.read("tick_rate", p.tick_rate);
    r.reject_unknown();
}

json staircase_json(const StaircaseConfig& c) {
    return json{{"start_scale", c.start_scale},
                {"up_step_initial", c.up_step_initial},
                {"down_step_initial", c.down_step_initial},
                {"up_step_late", c.up_step_late},
                {"down_step_late", c.down_step_late},
                {"step_change_after_reversals", c.step_change_after_reversals},
                {"terminate_after_reversals", c.terminate_after_reversals},
                {"jnd_window_reversals", c.jnd_window_reversals},
                {"floor_scale", c.floor_scale}};
}

void read_staircase(const json& j, StaircaseConfig& c) {
    ObjectReader r(j, "staircase");
    r.read("start_scale", c.start_scale);
    r.read("up_step_initial", c.up_step_initial);
    r.read("down_step_initial", c.down_step_initial);
    r.read("up_step_late", c.up_step_late);
    r.read("down_step_late", c.down_step_late);
    r.read("step_change_after_reversals", c.step_change_after_reversals);
    r.read("terminate_after_reversals", c.terminate_after_reversals);
    r.read("jnd_window_reversals", c.jnd_window_reversals);
    r.read("floor_scale", c.floor_scale);
    r.reject_unknown();
}

struct ObserverToJson {
    json operator()(const PsychometricObserver& o) const {
        return json{{"kind", "psychometric"}, {"alpha", o.alpha}, {"beta", o.beta}, {"lapse", o.lapse}};
    }
    json operator()(const EmbodiedObserver& o) const {
        json noise = json::object();
        for (ConditionMode mode : kAllConditions) {
            noise[std::string(to_string(mode))] = o.per_condition_noise_scale[condition_index(mode)];
        }
        return json{{"kind", "embodied"},
                    {"weber_fraction", o.weber_fraction},
                    {"lapse", o.lapse},
                    {"trajectory", {{"amplitude", o.trajectory.amplitude}, {"duration", o.trajectory.duration}}},
                    {"per_condition_noise_scale", noise}};
    }
    json operator()(const FixedResponseObserver& o) const {
        return json{{"kind", o.always_correct ? "always_correct" : "always_wrong"}};
    }
};

Observer read_observer(const json& j) {
    ObjectReader r(j, "observer");
    std::string kind = "psychometric";
    r.read("kind", kind);

    if (kind == "psychometric") {
        PsychometricObserver o;
        r.read("alpha", o.alpha);
        r.read("beta", o.beta);
        r.read("lapse", o.lapse);
        r.reject_unknown();
        return o;
    }
    if (kind == "embodied") {
        EmbodiedObserver o;
        r.read("weber_fraction", o.weber_fraction);
        r.read("lapse", o.lapse);
        if (const json* t = r.find("trajectory")) {
            ObjectReader tr(*t, "observer.trajectory");
            tr.read("amplitude", o.trajectory.amplitude);
            tr.read("duration", o.trajectory.duration);
            tr.reject_unknown();
        }
        if (const json* n = r.find("per_condition_noise_scale")) {
            if (!n->is_object()) throw ConfigError("observer.per_condition_noise_scale must be an object");
            for (auto it = n->begin(); it != n->end(); ++it) {
                const auto mode = parse_condition(it.key());
                if (!mode) throw ConfigError(fmt::format("observer.per_condition_noise_scale: unknown condition {}", it.key()));
                if (!it->is_number()) {
                    throw ConfigError(fmt::format("observer.per_condition_noise_scale.{} must be a number", it.key()));
                }
                o.per_condition_noise_scale[condition_index(*mode)] = it->get<double>();
            }
        }
        r.reject_unknown();
        return o;
    }
    if (kind == "always_correct" || kind == "always_wrong") {
        r.reject_unknown();
        return FixedResponseObserver{kind == "always_correct"};
    }
    throw ConfigError(fmt::format("observer.kind: unknown observer kind \"{}\"", kind));
}

json session_json(const SessionSettings& s) {
    return json{{"reference_kappa", s.reference_kappa},
                {"max_trials", s.max_trials},
                {"shuffle_all_conditions", s.shuffle_all_conditions},
                {"break_duration_s", s.break_duration_s}};
}

void read_session(const json& j, SessionSettings& s) {
    ObjectReader r(j, "session");
    r.read("reference_kappa", s.reference_kappa);
    r.read("max_trials", s.max_trials);
    r.read("shuffle_all_conditions", s.shuffle_all_conditions);
    r.read("break_duration_s", s.break_duration_s);
    r.reject_unknown();
}

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
}

} // namespace

namespace internal {

json protocol_to_json(const ProtocolConfig& config) {
    return json{{"plant", plant_json(config.plant)},
                {"staircase", staircase_json(config.staircase)},
                {"observer", std::visit(ObserverToJson{}, config.observer)},
                {"session", session_json(config.session)}};
}

ProtocolConfig protocol_from_json(const json& j) {
    ProtocolConfig config;
    ObjectReader r(j, "");
    if (const json* p = r.find("plant")) read_plant(*p, config.plant);
    if (const json* s = r.find("staircase")) read_staircase(*s, config.staircase);
    if (const json* o = r.find("observer")) config.observer = read_observer(*o);
    if (const json* s = r.find("session")) read_session(*s, config.session);
    r.reject_unknown();
    return config;
}

} // namespace internal

std::string protocol_config_json(const ProtocolConfig& config) { return internal::protocol_to_json(config).dump(2); }

ProtocolConfig parse_protocol_config(std::string_view json_text) {
    return internal::protocol_from_json(parse_text(json_text));
}

std::string harness_config_json(const HarnessConfig& config) {
    json j{{"schema_version", kConfigSchemaVersion}};
    const json protocol = internal::protocol_to_json(config.protocol);
    for (const auto& [key, value] : protocol.items()) j[key] = value;
    j["batch"] = json{{"replicates", config.batch.replicates},
                      {"base_seed", config.batch.base_seed},
                      {"threads", config.batch.threads},
                      {"write_trial_logs", config.batch.write_trial_logs},
                      {"write_traces", config.batch.write_traces}};
    j["output"] = json{{"directory", config.output_directory}};
    return j.dump(2);
}

HarnessConfig parse_harness_config(std::string_view json_text) {
    json j = parse_text(json_text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    HarnessConfig config;
    if (auto it = j.find("schema_version"); it != j.end()) {
        if (!it->is_number_integer() || it->get<int>() != kConfigSchemaVersion) {
            throw ConfigError(fmt::format("unsupported config schema_version {}", it->dump()));
        }
        j.erase("schema_version");
    }

    if (auto it = j.find("batch"); it != j.end()) {
        ObjectReader r(*it, "batch");
        r.read("replicates", config.batch.replicates);
        r.read("base_seed", config.batch.base_seed);
        r.read("threads", config.batch.threads);
        r.read("write_trial_logs", config.batch.write_trial_logs);
        r.read("write_traces", config.batch.write_traces);
        r.reject_unknown();
        j.erase("batch");
    }
    if (auto it = j.find("output"); it != j.end()) {
        ObjectReader r(*it, "output");
        r.read("directory", config.output_directory);
        r.reject_unknown();
        j.erase("output");
    }

    config.protocol = internal::protocol_from_json(j);
    return config;
}

HarnessConfig load_harness_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read config file {}", path.string()));
    std::ostringstream body;
    body << in.rdbuf();
    return parse_harness_config(body.str());
}

} // namespace stiffjnd
