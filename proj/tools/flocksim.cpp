#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flock/config.hpp"
#include "flock/output.hpp"
#include "flock/scenario.hpp"

namespace {

bool log_info() {
    const char* lvl = std::getenv("FLOCK_LOG");
    return lvl != nullptr && std::strcmp(lvl, "quiet") != 0 && std::strcmp(lvl, "0") != 0;
}

struct CommonOpts {
    std::string scenario;
    std::string config_file;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    double duration = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--scenario", opts.scenario, "builtin scenario name (scenario1|scenario2)");
    cmd->add_option("--config", opts.config_file, "configuration file overlaid on the builtin");
    cmd->add_option("--override", opts.overrides, "key=value refinement (repeatable)");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--duration", opts.duration, "run duration in seconds");
}

flock::ScenarioConfig resolve_config(const CommonOpts& opts) {
    flock::ScenarioConfig config =
        opts.scenario.empty() ? flock::ScenarioConfig{} : flock::builtin_scenario(opts.scenario);
    if (!opts.config_file.empty()) {
        config = flock::load_config_file(opts.config_file, std::move(config));
    }
    for (const std::string& ov : opts.overrides) {
        flock::apply_override(config, ov);
    }
    if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.duration >= 0.0) config.duration = opts.duration;
    flock::validate_config(config);
    return config;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto lo = std::stoull(text.substr(0, dots));
        const auto hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw flock::UsageError("--seeds range is inverted: " + text);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    }
    if (seeds.empty()) throw flock::UsageError("--seeds parsed to an empty list: " + text);
    return seeds;
}

int cmd_run(const CommonOpts& opts, const std::string& out_dir) {
    flock::ScenarioConfig config = resolve_config(opts);
    const auto t0 = std::chrono::steady_clock::now();
    const flock::RunRecord record = flock::run_scenario(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    flock::emit_outputs(record, config, out_dir, wall);
    if (log_info()) {
        std::fprintf(stderr, "[flock] run: %ld steps in %.3f s, bundle at %s\n",
                     record.steps, wall, out_dir.c_str());
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& out_dir, const std::string& seeds_text) {
    const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
    std::vector<std::pair<std::uint64_t, flock::RunRecord>> runs;
    runs.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        flock::ScenarioConfig config = resolve_config(opts);
        config.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        flock::RunRecord record = flock::run_scenario(config);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string dir =
            (std::filesystem::path(out_dir) / ("seed_" + std::to_string(seed))).string();
        flock::emit_outputs(record, config, dir, wall);
        if (log_info()) {
            std::fprintf(stderr, "[flock] sweep seed %llu done (%.3f s)\n",
                         static_cast<unsigned long long>(seed), wall);
        }
        runs.emplace_back(seed, std::move(record));
    }
    flock::write_file_atomic(
        (std::filesystem::path(out_dir) / "aggregate.txt").string(),
        flock::aggregate_summary(runs));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic leader-follower flock guidance simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, validate_opts, describe_opts;
    std::string run_out = "out";
    std::string sweep_out = "sweep";
    std::string sweep_seeds;
    std::string validate_positional;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario and write the output bundle");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--out", run_out, "output bundle directory");

    CLI::App* validate_cmd = app.add_subcommand("validate", "parse and validate a configuration");
    add_common(validate_cmd, validate_opts);
    validate_cmd->add_option("file", validate_positional, "configuration file to validate");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a list of seeds and aggregate");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--out", sweep_out, "output directory (per-seed subdirectories)");
    sweep_cmd->add_option("--seeds", sweep_seeds, "seed list: 1..8 or 1,5,9")->required();

    CLI::App* describe_cmd = app.add_subcommand("describe", "print the effective configuration");
    add_common(describe_cmd, describe_opts);

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(run_opts, run_out);
        if (validate_cmd->parsed()) {
            if (!validate_positional.empty()) validate_opts.config_file = validate_positional;
            resolve_config(validate_opts);
            std::puts("configuration is valid");
            return 0;
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_out, sweep_seeds);
        if (describe_cmd->parsed()) {
            std::fputs(flock::config_echo(resolve_config(describe_opts)).c_str(), stdout);
            return 0;
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const flock::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const flock::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const flock::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const flock::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    }
}
