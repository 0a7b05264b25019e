#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flock/scenario.hpp"

namespace flock {

std::string format_double(double v);  // 17 significant digits, round-trip exact

std::string metrics_csv(const RunRecord& record);
std::string states_csv(const RunRecord& record);
std::string summary_text(const RunRecord& record, const ScenarioConfig& config);
std::string plot_script();
std::string aggregate_summary(
    const std::vector<std::pair<std::uint64_t, RunRecord>>& runs);

void write_file_atomic(const std::string& path, const std::string& content);

// Writes metrics.csv, states.csv, summary.txt, config.echo and plot.gp into
// dir (created if missing). Wall-clock goes to a timing.txt sidecar so the
// rest of the bundle stays byte-reproducible.
void emit_outputs(const RunRecord& record, const ScenarioConfig& config,
                  const std::string& dir, double wall_seconds);

} // namespace flock
