#include "flock/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flock/config.hpp"

namespace flock {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metrics_csv(const RunRecord& record) {
    std::ostringstream os;
    os << "k,t,O_t,O_s,O_v,std_t,std_s,std_v\n";
    for (const MetricRow& m : record.metrics) {
        os << m.k << ',' << format_double(m.t) << ',' << format_double(m.O_t) << ','
           << format_double(m.O_s) << ',' << format_double(m.O_v) << ','
           << format_double(m.std_t) << ',' << format_double(m.std_s) << ','
           << format_double(m.std_v) << "\n";
    }
    return os.str();
}

std::string states_csv(const RunRecord& record) {
    std::ostringstream os;
    os << "k,agent,active,x,y,vx,vy,ut_x,ut_y,us_x,us_y,uc_x,uc_y\n";
    for (const StateRow& s : record.states) {
        os << s.k << ',' << s.agent << ',' << (s.active ? 1 : 0) << ','
           << format_double(s.x) << ',' << format_double(s.y) << ','
           << format_double(s.vx) << ',' << format_double(s.vy) << ','
           << format_double(s.ut_x) << ',' << format_double(s.ut_y) << ','
           << format_double(s.us_x) << ',' << format_double(s.us_y) << ','
           << format_double(s.uc_x) << ',' << format_double(s.uc_y) << "\n";
    }
    return os.str();
}

std::string summary_text(const RunRecord& record, const ScenarioConfig& config) {
    std::ostringstream os;
    os << "steps = " << record.steps << "\n";
    os << "followers = " << config.n_followers << "\n";
    if (!record.metrics.empty()) {
        const MetricRow& m = record.metrics.back();
        os << "final t = " << format_double(m.t) << "\n";
        os << "final O_t = " << format_double(m.O_t) << "\n";
        os << "final O_s = " << format_double(m.O_s) << "\n";
        os << "final O_v = " << format_double(m.O_v) << "\n";
        os << "final std_t = " << format_double(m.std_t) << "\n";
        os << "final std_s = " << format_double(m.std_s) << "\n";
        os << "final std_v = " << format_double(m.std_v) << "\n";
    }
    os << "topology epochs:\n";
    for (const TopologyEpoch& ep : record.epochs) {
        os << "  step " << ep.step << ": active = " << ep.n_active
           << " lambda2 = " << format_double(ep.lambda2)
           << " lambda_max = " << format_double(ep.lambda_max) << "\n";
    }
    os << "events:\n";
    for (const AppliedEvent& ev : record.applied_events) {
        os << "  step " << ev.step << " (t = " << format_double(ev.time) << "): "
           << ev.description << "\n";
    }
    double cost_x = 0.0, cost_y = 0.0;
    for (const auto& c : record.cumulative_costs) {
        cost_x += c[0];
        cost_y += c[1];
    }
    os << "cumulative tracking cost x = " << format_double(cost_x) << "\n";
    os << "cumulative tracking cost y = " << format_double(cost_y) << "\n";
    os << "value monotonicity violations = " << record.monotonicity_violations << "\n";
    os << "wall clock: see timing.txt\n";
    return os.str();
}

std::string plot_script() {
    return
        "# gnuplot script for the run metrics; run from the bundle directory:\n"
        "#   gnuplot plot.gp\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't [s]'\n"
        "set terminal pngcairo size 900,600\n"
        "set output 'tracking.png'\n"
        "set ylabel 'O_t [m]'\n"
        "plot 'metrics.csv' using 2:3 with lines title 'O_t', \\\n"
        "     'metrics.csv' using 2:6 with lines title 'std_t'\n"
        "set output 'separation.png'\n"
        "set ylabel 'O_s [m]'\n"
        "plot 'metrics.csv' using 2:4 with lines title 'O_s', \\\n"
        "     'metrics.csv' using 2:7 with lines title 'std_s'\n"
        "set output 'velocity.png'\n"
        "set ylabel 'O_v [m/s]'\n"
        "plot 'metrics.csv' using 2:5 with lines title 'O_v', \\\n"
        "     'metrics.csv' using 2:8 with lines title 'std_v'\n";
}

std::string aggregate_summary(
    const std::vector<std::pair<std::uint64_t, RunRecord>>& runs) {
    std::ostringstream os;
    os << "seeds = " << runs.size() << "\n";
    double sum_ot = 0.0, sum_os = 0.0, sum_sv = 0.0;
    double max_abs_os = 0.0, max_sv = 0.0;
    for (const auto& [seed, record] : runs) {
        const MetricRow& m = record.metrics.back();
        os << "seed " << seed << ": O_t = " << format_double(m.O_t)
           << " O_s = " << format_double(m.O_s)
           << " std_v = " << format_double(m.std_v) << "\n";
        sum_ot += m.O_t;
        sum_os += m.O_s;
        sum_sv += m.std_v;
        max_abs_os = std::max(max_abs_os, std::abs(m.O_s));
        max_sv = std::max(max_sv, m.std_v);
    }
    const double n = runs.empty() ? 1.0 : static_cast<double>(runs.size());
    os << "mean final O_t = " << format_double(sum_ot / n) << "\n";
    os << "mean final O_s = " << format_double(sum_os / n) << "\n";
    os << "mean final std_v = " << format_double(sum_sv / n) << "\n";
    os << "max final |O_s| = " << format_double(max_abs_os) << "\n";
    os << "max final std_v = " << format_double(max_sv) << "\n";
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw IoError("short write to '" + tmp + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void emit_outputs(const RunRecord& record, const ScenarioConfig& config,
                  const std::string& dir, double wall_seconds) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path base(dir);
    write_file_atomic((base / "metrics.csv").string(), metrics_csv(record));
    write_file_atomic((base / "states.csv").string(), states_csv(record));
    write_file_atomic((base / "summary.txt").string(), summary_text(record, config));
    write_file_atomic((base / "config.echo").string(), config_echo(config));
    write_file_atomic((base / "plot.gp").string(), plot_script());
    write_file_atomic((base / "timing.txt").string(),
                      "wall_seconds = " + format_double(wall_seconds) + "\n");
}

} // namespace flock
