// Command-line front end: run | batch | trace | validate.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stiffjnd/config.hpp"
#include "stiffjnd/error.hpp"
#include "stiffjnd/harness.hpp"
#include "stiffjnd/session_io.hpp"

namespace fs = std::filesystem;
using namespace stiffjnd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

HarnessConfig load_or_default(const std::string& path) {
    return path.empty() ? HarnessConfig{} : load_harness_config(path);
}

void print_violations(const std::vector<Violation>& violations) {
    for (const auto& v : violations) std::cerr << fmt::format("  {}: {}\n", v.field, v.message);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void print_summary(const BatchSummary& s) {
    std::cout << fmt::format("{:<6} {:>9} {:>13} {:>10} {:>10} {:>8}\n", "cond", "converged", "non_converged",
                             "mean_jnd%", "median%", "sd%");
    auto num = [](const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : std::string("NA"); };
    for (const auto& c : s.per_condition) {
        std::cout << fmt::format("{:<6} {:>9} {:>13} {:>10} {:>10} {:>8}\n", to_string(c.condition), c.converged,
                                 c.non_converged, num(c.mean_jnd), num(c.median_jnd), num(c.sd_jnd));
    }
    std::cout << fmt::format("window proportion correct: {}  equilibrium: {:.4f}\n",
                             num(s.window_proportion_correct), s.equilibrium);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive stiffness-discrimination staircase simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<int> replicates;
    std::optional<int> threads;

    auto* run = app.add_subcommand("run", "Run one session and write its log, traces and summary");
    run->add_option("-c,--config", config_path, "Harness config file (JSON)")->check(CLI::ExistingFile);
    run->add_option("-s,--seed", seed, "Session seed (default: batch.base_seed)");
    run->add_option("-o,--out", out_dir, "Output directory (default: output.directory)");

    auto* batch = app.add_subcommand("batch", "Run a Monte Carlo batch of sessions");
    batch->add_option("-c,--config", config_path, "Harness config file (JSON)")->check(CLI::ExistingFile);
    batch->add_option("-s,--seed", seed, "Base seed (overrides batch.base_seed)");
    batch->add_option("-o,--out", out_dir, "Output directory (default: output.directory)");
    batch->add_option("-n,--replicates", replicates, "Replicate count (overrides batch.replicates)");
    batch->add_option("-j,--threads", threads, "Worker threads, 0 = all cores (overrides batch.threads)");

    std::string log_path;
    std::string condition_name;
    auto* trace = app.add_subcommand("trace", "Export staircase traces from a session log");
    trace->add_option("-l,--log", log_path, "Session log (log.jsonl)")->required()->check(CLI::ExistingFile);
    trace->add_option("--condition", condition_name, "Single condition to export (default: all)");
    trace->add_option("-o,--out", out_dir, "Output file (single condition) or directory")->required();

    auto* validate = app.add_subcommand("validate", "Check a config file and list every violation");
    validate->add_option("-c,--config", config_path, "Harness config file (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const HarnessConfig config = load_harness_config(config_path);
            const auto violations = validate_config(config);
            if (violations.empty()) {
                std::cout << "ok\n";
                return kExitOk;
            }
            std::cerr << fmt::format("{} violation(s):\n", violations.size());
            print_violations(violations);
            return kExitConfig;
        }

        if (*trace) {
            const ParsedLog log = parse_session_log(read_text(log_path));
            if (!condition_name.empty()) {
                const auto mode = parse_condition(condition_name);
                if (!mode) {
                    std::cerr << fmt::format("unknown condition {}\n", condition_name);
                    return kExitConfig;
                }
                const auto* end = log.finished(*mode);
                const auto trials = log.trials(*mode);
                std::ofstream out(out_dir, std::ios::binary);
                if (!out) throw IoError(fmt::format("cannot write {}", out_dir));
                out << trace_export(*mode, trials, end != nullptr && end->converged);
                return kExitOk;
            }
            prepare_output_directory(out_dir);
            for (ConditionMode mode : log.condition_order) {
                const auto* end = log.finished(mode);
                std::ofstream out(fs::path(out_dir) / fmt::format("{}.csv", to_string(mode)), std::ios::binary);
                if (!out) throw IoError(fmt::format("cannot write into {}", out_dir));
                out << trace_export(mode, log.trials(mode), end != nullptr && end->converged);
            }
            return kExitOk;
        }

        HarnessConfig config = load_or_default(config_path);
        if (seed) config.batch.base_seed = *seed;
        if (replicates) config.batch.replicates = *replicates;
        if (threads) config.batch.threads = *threads;
        if (!out_dir.empty()) config.output_directory = out_dir;

        if (const auto violations = validate_config(config); !violations.empty()) {
            std::cerr << fmt::format("invalid config, {} violation(s):\n", violations.size());
            print_violations(violations);
            return kExitConfig;
        }

        if (*run) {
            const SessionResult result = run_single(config, config.batch.base_seed, config.output_directory);
            for (const auto& outcome : result.conditions) {
                std::cout << fmt::format("{:<4} trials={:<4} ", to_string(outcome.condition), outcome.trials.size());
                std::cout << (outcome.jnd ? fmt::format("jnd={:.2f}%\n", outcome.jnd->jnd_percent)
                                          : std::string("non-converged\n"));
            }
            return kExitOk;
        }

        const BatchSummary summary = run_batch(config, config.output_directory);
        print_summary(summary);
        return kExitOk;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
