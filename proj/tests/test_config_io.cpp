#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flock/config.hpp"
#include "flock/output.hpp"

using namespace flock;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("empty document leaves the base configuration untouched") {
    const ScenarioConfig base = builtin_scenario("scenario1");
    const ScenarioConfig parsed = parse_config_text("\n# just a comment\n\n", base);
    CHECK(config_echo(parsed) == config_echo(base));
}

TEST_CASE("parse errors carry the offending line number") {
    const ScenarioConfig base = builtin_scenario("scenario1");
    try {
        parse_config_text("scenario.duration = 10\nbogus.key = 1\n", base);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("bogus.key") != std::string::npos);
    }
    try {
        parse_config_text("separation.d = two\n", base);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("scenario.duration\n", base), ConfigError);
    CHECK_THROWS_AS(parse_config_text("= 4\n", base), ConfigError);
}

TEST_CASE("negative safety distance parses but fails validation") {
    const ScenarioConfig base = builtin_scenario("scenario1");
    const ScenarioConfig parsed = parse_config_text("separation.d = -1\n", base);
    CHECK(parsed.separation.d == -1.0);
    CHECK_THROWS_AS(validate_config(parsed), ConfigError);
}

TEST_CASE("out-of-order disturbance times fail validation") {
    const ScenarioConfig base = builtin_scenario("scenario1");
    const ScenarioConfig parsed = parse_config_text(
        "disturbance.1.time = 20\n"
        "disturbance.1.action = set_safety_distance\n"
        "disturbance.1.d = 2.5\n"
        "disturbance.2.time = 10\n"
        "disturbance.2.action = decommission\n"
        "disturbance.2.agents = 1 2\n",
        base);
    CHECK_THROWS_AS(validate_config(parsed), ConfigError);
}

TEST_CASE("disturbance indices must be contiguous") {
    const ScenarioConfig base = builtin_scenario("scenario1");
    CHECK_THROWS_AS(parse_config_text("disturbance.2.time = 10\n", base), ConfigError);
    CHECK_THROWS_AS(parse_config_text("disturbance.0.time = 10\n", base), ConfigError);
}

TEST_CASE("an override changes exactly its own echoed line") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    const std::vector<std::string> before = lines_of(config_echo(cfg));
    apply_override(cfg, "tracking.rho_a=0.02");
    const std::vector<std::string> after = lines_of(config_echo(cfg));
    REQUIRE(before.size() == after.size());
    int changed = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i] != after[i]) {
            ++changed;
            CHECK(after[i] == "tracking.rho_a = 0.02");
        }
    }
    CHECK(changed == 1);
}

TEST_CASE("override without an assignment is a usage error") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    CHECK_THROWS_AS(apply_override(cfg, "tracking.rho_a"), UsageError);
    CHECK_THROWS_AS(apply_override(cfg, "nope.nope=1"), ConfigError);
}

TEST_CASE("echo round-trips through the parser byte for byte") {
    for (const char* name : {"scenario1", "scenario2"}) {
        const ScenarioConfig cfg = builtin_scenario(name);
        const std::string echo1 = config_echo(cfg);
        const ScenarioConfig reparsed = parse_config_text(echo1, ScenarioConfig{});
        CHECK(config_echo(reparsed) == echo1);
    }
}

TEST_CASE("formatted doubles scan back to the identical bits") {
    const double values[] = {0.0,         -0.0,    1.0 / 3.0, 5.0 * std::cos(0.03),
                             1.7321,      1e-300,  -2.5e17,   0.1,
                             1234567.875, 3.0 / 7.0};
    for (double v : values) {
        const std::string s = format_double(v);
        const double back = std::stod(s);
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("csv serializations carry the documented headers and row counts") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 0.0;
    const RunRecord rec = run_scenario(cfg);
    const auto metric_lines = lines_of(metrics_csv(rec));
    REQUIRE(metric_lines.size() == 2);
    CHECK(metric_lines[0] == "k,t,O_t,O_s,O_v,std_t,std_s,std_v");
    const auto state_lines = lines_of(states_csv(rec));
    REQUIRE(state_lines.size() == 22);
    CHECK(state_lines[0] == "k,agent,active,x,y,vx,vy,ut_x,ut_y,us_x,us_y,uc_x,uc_y");
    CHECK(state_lines[1].rfind("0,0,1,", 0) == 0);
}

TEST_CASE("a full run produces one metric row per step plus the initial row") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.seed = 1;
    const RunRecord rec = run_scenario(cfg);
    CHECK(rec.steps == 400);
    CHECK(lines_of(metrics_csv(rec)).size() == 402);
    CHECK(lines_of(states_csv(rec)).size() == 1 + 401 * 21);
}

TEST_CASE("output bundles are byte-reproducible apart from timing") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 2.0;
    cfg.seed = 3;
    const RunRecord rec = run_scenario(cfg);
    const fs::path dir = fs::temp_directory_path() / "flock_test_bundle";
    fs::remove_all(dir);
    emit_outputs(rec, cfg, dir.string(), 0.125);
    for (const char* f : {"metrics.csv", "states.csv", "summary.txt", "config.echo",
                          "plot.gp", "timing.txt"}) {
        CHECK(fs::exists(dir / f));
    }
    const std::string summary = slurp(dir / "summary.txt");
    CHECK(summary.find("wall clock: see timing.txt") != std::string::npos);
    CHECK(slurp(dir / "timing.txt") == "wall_seconds = 0.125\n");

    std::vector<std::string> first;
    const char* stable[] = {"metrics.csv", "states.csv", "summary.txt", "config.echo", "plot.gp"};
    for (const char* f : stable) first.push_back(slurp(dir / f));
    const RunRecord rec2 = run_scenario(cfg);
    emit_outputs(rec2, cfg, dir.string(), 99.0);  // different wall clock
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(slurp(dir / stable[i]) == first[i]);
    }
    CHECK(slurp(dir / "timing.txt") != "wall_seconds = 0.125\n");
    fs::remove_all(dir);
}

TEST_CASE("an unwritable destination raises an i/o error") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 0.0;
    const RunRecord rec = run_scenario(cfg);
    CHECK_THROWS_AS(emit_outputs(rec, cfg, "/dev/null/sub", 0.0), IoError);
}

TEST_CASE("aggregate summary reports per-seed finals and the extremes") {
    RunRecord a, b;
    MetricRow ma;
    ma.O_t = 1.5;
    ma.O_s = -0.25;
    ma.std_v = 0.01;
    a.metrics.push_back(ma);
    MetricRow mb;
    mb.O_t = 0.5;
    mb.O_s = 0.05;
    mb.std_v = 0.03;
    b.metrics.push_back(mb);
    std::vector<std::pair<std::uint64_t, RunRecord>> runs;
    runs.emplace_back(1, a);
    runs.emplace_back(2, b);
    const std::string text = aggregate_summary(runs);
    CHECK(text.find("seeds = 2") != std::string::npos);
    CHECK(text.find("seed 1: O_t = 1.5") != std::string::npos);
    CHECK(text.find("mean final O_t = 1") != std::string::npos);
    CHECK(text.find("max final |O_s| = 0.25") != std::string::npos);
    CHECK(text.find("max final std_v = " + format_double(0.03)) != std::string::npos);
}
