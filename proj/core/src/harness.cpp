#include "stiffjnd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "internal/json_config.hpp"
#include "stiffjnd/error.hpp"
#include "stiffjnd/session_io.hpp"

namespace stiffjnd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<Violation> validate_config(const HarnessConfig& config) {
    std::vector<Violation> out = config.protocol.violations();
    if (config.batch.replicates < 1) {
        out.push_back({"batch.replicates", fmt::format("must be >= 1, got {}", config.batch.replicates)});
    }
    if (config.batch.threads < 0) {
        out.push_back({"batch.threads", fmt::format("must be >= 0, got {}", config.batch.threads)});
    }
    return out;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return derive_seed(base_seed, index);
}

std::string trace_export(ConditionMode condition, std::span<const TrialRecord> trials, bool converged) {
    std::string out = fmt::format("# schema_version={}\n# condition={}\n# converged={}\ntrial,scale_percent,reversal\n",
                                  kTraceSchemaVersion, to_string(condition), converged ? "true" : "false");
    for (const auto& t : trials) {
        out += fmt::format("{},{:.10g},{}\n", t.trial_index, t.s_test * 100.0, t.reversal ? 1 : 0);
    }
    return out;
}

std::span<const TrialRecord> jnd_window_trials(const ConditionOutcome& outcome, const StaircaseConfig& config) {
    if (!outcome.converged) return {};
    const auto& reversals = outcome.final_state.reversals;
    const auto window = static_cast<std::size_t>(config.jnd_window_reversals);
    const int first = reversals[reversals.size() - window].trial;
    const int last = reversals.back().trial;
    if (last - first < 2) return {};
    // trial_index is 1-based, so index `first` is the trial after the reversal
    return std::span<const TrialRecord>(outcome.trials)
        .subspan(static_cast<std::size_t>(first), static_cast<std::size_t>(last - first - 1));
}

ReplicateDigest digest(const SessionResult& result) {
    ReplicateDigest d;
    d.seed = result.seed;
    for (const auto& outcome : result.conditions) {
        if (outcome.jnd) d.jnd_percent[condition_index(outcome.condition)] = outcome.jnd->jnd_percent;
        for (const auto& t : jnd_window_trials(outcome, result.config.staircase)) {
            ++d.window_trials;
            if (t.correct) ++d.window_correct;
        }
    }
    return d;
}

BatchSummary summarize(std::span<const ReplicateDigest> replicates, const HarnessConfig& config) {
    BatchSummary s;
    s.replicates = static_cast<int>(replicates.size());
    s.base_seed = config.batch.base_seed;
    s.equilibrium = equilibrium_proportion(config.protocol.staircase);

    for (ConditionMode mode : kAllConditions) {
        ConditionStats& stats = s.per_condition[condition_index(mode)];
        stats.condition = mode;
        std::vector<double> values;
        for (const auto& r : replicates) {
            if (const auto& v = r.jnd_percent[condition_index(mode)]) {
                values.push_back(*v);
            } else {
                ++stats.non_converged;
            }
        }
        stats.converged = static_cast<int>(values.size());
        if (values.empty()) continue;

        const double n = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        stats.mean_jnd = mean;

        std::sort(values.begin(), values.end());
        const std::size_t mid = values.size() / 2;
        stats.median_jnd = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);

        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            stats.sd_jnd = std::sqrt(ss / (n - 1.0));
        }
    }

    for (const auto& r : replicates) {
        const bool all = std::all_of(r.jnd_percent.begin(), r.jnd_percent.end(), [](const auto& v) { return v.has_value(); });
        ++(all ? s.sessions_converged : s.sessions_non_converged);
        s.window_trials += r.window_trials;
        s.window_correct += r.window_correct;
    }
    if (s.window_trials > 0) {
        s.window_proportion_correct = static_cast<double>(s.window_correct) / static_cast<double>(s.window_trials);
        s.equilibrium_gap = *s.window_proportion_correct - s.equilibrium;
    }
    return s;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json batch_echo(const HarnessConfig& config) {
    json j = internal::protocol_to_json(config.protocol);
    j["batch"] = json{{"replicates", config.batch.replicates},
                      {"base_seed", config.batch.base_seed},
                      {"write_trial_logs", config.batch.write_trial_logs},
                      {"write_traces", config.batch.write_traces}};
    return j;
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

void make_directories(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
    }
}

} // namespace

std::string summary_json(const BatchSummary& s, const HarnessConfig& config) {
    json conditions = json::array();
    for (const auto& c : s.per_condition) {
        conditions.push_back(json{{"condition", to_string(c.condition)},
                                  {"converged", c.converged},
                                  {"non_converged", c.non_converged},
                                  {"mean_jnd_percent", optional_number(c.mean_jnd)},
                                  {"median_jnd_percent", optional_number(c.median_jnd)},
                                  {"sd_jnd_percent", optional_number(c.sd_jnd)}});
    }
    json j{{"schema_version", kSummarySchemaVersion},
           {"replicates", s.replicates},
           {"base_seed", s.base_seed},
           {"sessions_converged", s.sessions_converged},
           {"sessions_non_converged", s.sessions_non_converged},
           {"conditions", std::move(conditions)},
           {"convergence",
            {{"window_trials", s.window_trials},
             {"window_correct", s.window_correct},
             {"window_proportion_correct", optional_number(s.window_proportion_correct)},
             {"equilibrium_proportion", s.equilibrium},
             {"gap", optional_number(s.equilibrium_gap)}}},
           {"config", batch_echo(config)}};
    return j.dump(2) + "\n";
}

std::string jnd_matrix_csv(std::span<const ReplicateDigest> replicates) {
    std::string out = fmt::format("# schema_version={}\ncondition", kMatrixSchemaVersion);
    for (std::size_t i = 0; i < replicates.size(); ++i) out += fmt::format(",r{:04}", i);
    out += '\n';
    for (ConditionMode mode : kAllConditions) {
        out += to_string(mode);
        for (const auto& r : replicates) {
            const auto& v = r.jnd_percent[condition_index(mode)];
            out += v ? fmt::format(",{:.10g}", *v) : std::string(",NA");
        }
        out += '\n';
    }
    return out;
}

void write_session_artifacts(const SessionResult& result, const fs::path& dir, const BatchSettings& settings) {
    make_directories(dir);
    if (settings.write_trial_logs) write_file(dir / "log.jsonl", session_log_jsonl(result));
    if (settings.write_traces) {
        make_directories(dir / "traces");
        for (const auto& outcome : result.conditions) {
            write_file(dir / "traces" / fmt::format("{}.csv", to_string(outcome.condition)),
                       trace_export(outcome.condition, outcome.trials, outcome.converged));
        }
    }
}

void prepare_output_directory(const fs::path& dir) {
    make_directories(dir);
    const fs::path probe = dir / ".write_probe";
    write_file(probe, "");
    std::error_code ec;
    fs::remove(probe, ec);
}

namespace {

void require_valid(const HarnessConfig& config) {
    const auto problems = validate_config(config);
    if (problems.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& v : problems) msg += fmt::format("\n  {}: {}", v.field, v.message);
    throw ConfigError(msg);
}

} // namespace

SessionResult run_single(const HarnessConfig& config, std::uint64_t seed, const fs::path& out_dir) {
    require_valid(config);
    prepare_output_directory(out_dir);

    SessionResult result = run_session(plan_session(seed, config.protocol));
    write_session_artifacts(result, out_dir, config.batch);

    const std::array<ReplicateDigest, 1> digests{digest(result)};
    HarnessConfig echo = config;
    echo.batch.replicates = 1;
    echo.batch.base_seed = seed;
    write_file(out_dir / "summary.json", summary_json(summarize(digests, echo), echo));
    return result;
}

BatchSummary run_batch(const HarnessConfig& config, const fs::path& out_dir) {
    require_valid(config);
    prepare_output_directory(out_dir);

    const auto count = static_cast<std::size_t>(config.batch.replicates);
    std::vector<ReplicateDigest> digests(count);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                const std::uint64_t seed = replicate_seed(config.batch.base_seed, i);
                SessionResult result = run_session(plan_session(seed, config.protocol));
                if (config.batch.write_trial_logs || config.batch.write_traces) {
                    write_session_artifacts(result, out_dir / "replicates" / fmt::format("{:04}", i), config.batch);
                }
                digests[i] = digest(result);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };

    unsigned threads = config.batch.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                 : static_cast<unsigned>(config.batch.threads);
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    BatchSummary summary = summarize(digests, config);
    write_file(out_dir / "jnd_matrix.csv", jnd_matrix_csv(digests));
    write_file(out_dir / "summary.json", summary_json(summary, config));
    return summary;
}

} // namespace stiffjnd
