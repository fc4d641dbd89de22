#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stiffjnd/session.hpp"

namespace stiffjnd {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kMatrixSchemaVersion = 1;

struct BatchSettings {
    int replicates = 1;
    std::uint64_t base_seed = 1;
    int threads = 1;  ///< 0 = hardware concurrency
    bool write_trial_logs = true;
    bool write_traces = true;
};

struct HarnessConfig {
    ProtocolConfig protocol;
    BatchSettings batch;
    std::string output_directory = "out";
};

/// Every invariant failure across all sub-configs, not just the first.
std::vector<Violation> validate_config(const HarnessConfig& config);

/// Seed of replicate `index`: mix64(base_seed ^ mix64(index)).
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// Plot-ready staircase trace of one condition: a comment header with
/// schema version, condition and convergence flag, then
/// `trial,scale_percent,reversal` rows with the presented test scale.
std::string trace_export(ConditionMode condition, std::span<const TrialRecord> trials, bool converged);

/// Trials strictly between the first and the last reversal of the JND
/// window. The bounding reversal trials are excluded because their
/// responses are fixed by the reversal direction. Empty for an unconverged
/// run.
std::span<const TrialRecord> jnd_window_trials(const ConditionOutcome& outcome, const StaircaseConfig& config);

struct ConditionStats {
    ConditionMode condition = ConditionMode::C1;
    int converged = 0;
    int non_converged = 0;
    std::optional<double> mean_jnd;
    std::optional<double> median_jnd;
    std::optional<double> sd_jnd;  ///< sample SD; needs two converged runs
};

struct BatchSummary {
    int replicates = 0;
    std::uint64_t base_seed = 0;
    std::array<ConditionStats, 7> per_condition;  ///< kAllConditions order
    int sessions_converged = 0;                   ///< all seven conditions converged
    int sessions_non_converged = 0;
    long long window_trials = 0;
    long long window_correct = 0;
    std::optional<double> window_proportion_correct;
    double equilibrium = 0.0;
    std::optional<double> equilibrium_gap;  ///< measured - equilibrium
};

/// Per-replicate data the summary is built from.
struct ReplicateDigest {
    std::uint64_t seed = 0;
    std::array<std::optional<double>, 7> jnd_percent;  ///< kAllConditions order
    long long window_trials = 0;
    long long window_correct = 0;
};

ReplicateDigest digest(const SessionResult& result);

BatchSummary summarize(std::span<const ReplicateDigest> replicates, const HarnessConfig& config);

std::string summary_json(const BatchSummary& summary, const HarnessConfig& config);

/// Conditions x replicates, "NA" for unconverged cells.
std::string jnd_matrix_csv(std::span<const ReplicateDigest> replicates);

/// Writes log.jsonl and traces/<condition>.csv under `dir` as enabled.
void write_session_artifacts(const SessionResult& result, const std::filesystem::path& dir,
                             const BatchSettings& settings);

/// Creates `dir` and proves it writable; throws IoError otherwise.
void prepare_output_directory(const std::filesystem::path& dir);

/// Single session with `seed` used as-is; writes session artifacts and a
/// one-replicate summary.json into `out_dir`.
SessionResult run_single(const HarnessConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Runs config.batch.replicates sessions with replicate_seed() seeds and writes
///   replicates/NNNN/{log.jsonl, traces/<condition>.csv}
///   jnd_matrix.csv
///   summary.json
/// under `out_dir`. Throws ConfigError for an invalid config and IoError
/// for an unwritable directory, both before any simulation runs.
BatchSummary run_batch(const HarnessConfig& config, const std::filesystem::path& out_dir);

} // namespace stiffjnd
