#include "flock/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace flock {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size()) throw ConfigError(key + ": trailing characters in '" + value + "'");
    return v;
}

long parse_long(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    if (pos != value.size()) throw ConfigError(key + ": trailing characters in '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long v;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
    }
    if (pos != value.size()) throw ConfigError(key + ": trailing characters in '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::istringstream ss(value);
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(key, tok));
    return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::istringstream ss(value);
    std::string tok;
    while (ss >> tok) out.push_back(static_cast<int>(parse_long(key, tok)));
    return out;
}

void set_disturbance_key(ScenarioConfig& config, const std::string& key,
                         const std::string& field, long index, const std::string& value) {
    if (index < 1 || index > static_cast<long>(config.events.size()) + 1) {
        throw ConfigError(key + ": disturbance indices must be contiguous from 1");
    }
    if (index == static_cast<long>(config.events.size()) + 1) {
        config.events.emplace_back();
    }
    DisturbanceEvent& ev = config.events[static_cast<std::size_t>(index - 1)];
    if (field == "time") {
        ev.time = parse_double(key, value);
    } else if (field == "action") {
        if (value == "decommission") ev.kind = DisturbanceEvent::Kind::Decommission;
        else if (value == "switch_leader") ev.kind = DisturbanceEvent::Kind::SwitchLeader;
        else if (value == "set_safety_distance") ev.kind = DisturbanceEvent::Kind::SetSafetyDistance;
        else throw ConfigError(key + ": unknown action '" + value + "'");
    } else if (field == "agents") {
        ev.agents = parse_ints(key, value);
    } else if (field == "leader_kind") {
        if (value == "linear") ev.leader_kind = LeaderPhase::Kind::Linear;
        else if (value == "circular") ev.leader_kind = LeaderPhase::Kind::Circular;
        else throw ConfigError(key + ": unknown leader kind '" + value + "'");
    } else if (field == "vx") {
        ev.leader_velocity.x() = parse_double(key, value);
    } else if (field == "vy") {
        ev.leader_velocity.y() = parse_double(key, value);
    } else if (field == "radius") {
        ev.leader_radius = parse_double(key, value);
    } else if (field == "rate") {
        ev.leader_rate = parse_double(key, value);
    } else if (field == "d") {
        ev.new_d = parse_double(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

void set_key(ScenarioConfig& config, const std::string& key, const std::string& value) {
    if (key.rfind("disturbance.", 0) == 0) {
        const std::string rest = key.substr(12);
        const std::size_t dot = rest.find('.');
        if (dot == std::string::npos) throw ConfigError("unknown key '" + key + "'");
        const long index = parse_long(key, rest.substr(0, dot));
        set_disturbance_key(config, key, rest.substr(dot + 1), index, value);
        return;
    }
    if (key == "scenario.followers") config.n_followers = static_cast<int>(parse_long(key, value));
    else if (key == "scenario.duration") config.duration = parse_double(key, value);
    else if (key == "scenario.sampling_period") config.T = parse_double(key, value);
    else if (key == "scenario.seed") config.seed = parse_u64(key, value);
    else if (key == "init.position_min") config.init_pos_lo = parse_double(key, value);
    else if (key == "init.position_max") config.init_pos_hi = parse_double(key, value);
    else if (key == "init.velocity_min") config.init_vel_lo = parse_double(key, value);
    else if (key == "init.velocity_max") config.init_vel_hi = parse_double(key, value);
    else if (key == "limits.velocity_min") config.v_min = parse_double(key, value);
    else if (key == "limits.velocity_max") config.v_max = parse_double(key, value);
    else if (key == "terms.tracking") config.tracking_enabled = parse_bool(key, value);
    else if (key == "terms.separation") config.separation_enabled = parse_bool(key, value);
    else if (key == "terms.consensus") config.consensus_enabled = parse_bool(key, value);
    else if (key == "tracking.q_diag") {
        const auto diag = parse_doubles(key, value);
        if (diag.size() != 3) throw ConfigError(key + ": expected 3 entries");
        config.tracking.Q = Eigen::Vector3d(diag[0], diag[1], diag[2]).asDiagonal();
    } else if (key == "tracking.r") config.tracking.R = parse_double(key, value);
    else if (key == "tracking.rho_a") config.tracking.rho_a = parse_double(key, value);
    else if (key == "tracking.rho_c") config.tracking.rho_c = parse_double(key, value);
    else if (key == "tracking.eps_inv") config.tracking.eps_inv = parse_double(key, value);
    else if (key == "tracking.gradient_consistent") config.tracking.gradient_consistent = parse_bool(key, value);
    else if (key == "tracking.init_gain") config.tracking_init_gain = parse_doubles(key, value);
    else if (key == "separation.d") config.separation.d = parse_double(key, value);
    else if (key == "separation.alpha_a") config.separation.alpha_a = parse_double(key, value);
    else if (key == "separation.alpha_c") config.separation.alpha_c = parse_double(key, value);
    else if (key == "separation.universe_min") config.separation.universe_lo = parse_double(key, value);
    else if (key == "separation.universe_max") config.separation.universe_hi = parse_double(key, value);
    else if (key == "separation.centers") config.mf_centers = parse_doubles(key, value);
    else if (key == "separation.offset") config.mf_offset = parse_double(key, value);
    else if (key == "separation.literal_offsets") config.literal_offsets = parse_bool(key, value);
    else if (key == "separation.td_deadzone") config.separation.td_deadzone = parse_double(key, value);
    else if (key == "separation.deadzone_critic") config.separation.deadzone_applies_to_critic = parse_bool(key, value);
    else if (key == "separation.critic_bound") config.separation.critic_bound = parse_double(key, value);
    else if (key == "separation.euclidean_credit") config.separation.euclidean_credit = parse_bool(key, value);
    else if (key == "separation.radial_coupling") config.separation.radial_coupling = parse_bool(key, value);
    else if (key == "separation.actor_init") config.phi_init = parse_doubles(key, value);
    else if (key == "separation.critic_init") config.Phi_init = parse_doubles(key, value);
    else if (key == "separation.shared_bank") config.shared_bank = parse_bool(key, value);
    else if (key == "consensus.c0") config.c0 = parse_double(key, value);
    else if (key == "leader.kind") {
        if (config.leader.empty()) config.leader.push_back(LeaderPhase{});
        if (value == "circular") config.leader[0].kind = LeaderPhase::Kind::Circular;
        else if (value == "linear") config.leader[0].kind = LeaderPhase::Kind::Linear;
        else throw ConfigError(key + ": unknown leader kind '" + value + "'");
    } else if (key == "leader.radius") {
        if (config.leader.empty()) config.leader.push_back(LeaderPhase{});
        config.leader[0].radius = parse_double(key, value);
    } else if (key == "leader.rate") {
        if (config.leader.empty()) config.leader.push_back(LeaderPhase{});
        config.leader[0].step_rate = parse_double(key, value);
    } else if (key == "leader.vx") {
        if (config.leader.empty()) config.leader.push_back(LeaderPhase{});
        config.leader[0].velocity.x() = parse_double(key, value);
    } else if (key == "leader.vy") {
        if (config.leader.empty()) config.leader.push_back(LeaderPhase{});
        config.leader[0].velocity.y() = parse_double(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ' ';
        out += fmt(vs[i]);
    }
    return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

} // namespace

ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base) {
    std::istringstream ss(text);
    std::string line;
    long lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        try {
            set_key(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

void apply_override(ScenarioConfig& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw UsageError("--override expects key=value, got '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    set_key(config, key, value);
}

std::string config_echo(const ScenarioConfig& config) {
    std::ostringstream os;
    os << "# effective configuration\n";
    os << "scenario.followers = " << config.n_followers << "\n";
    os << "scenario.duration = " << fmt(config.duration) << "\n";
    os << "scenario.sampling_period = " << fmt(config.T) << "\n";
    os << "scenario.seed = " << config.seed << "\n";
    os << "init.position_min = " << fmt(config.init_pos_lo) << "\n";
    os << "init.position_max = " << fmt(config.init_pos_hi) << "\n";
    os << "init.velocity_min = " << fmt(config.init_vel_lo) << "\n";
    os << "init.velocity_max = " << fmt(config.init_vel_hi) << "\n";
    os << "limits.velocity_min = " << fmt(config.v_min) << "\n";
    os << "limits.velocity_max = " << fmt(config.v_max) << "\n";
    os << "terms.tracking = " << fmt_bool(config.tracking_enabled) << "\n";
    os << "terms.separation = " << fmt_bool(config.separation_enabled) << "\n";
    os << "terms.consensus = " << fmt_bool(config.consensus_enabled) << "\n";
    os << "tracking.q_diag = " << fmt({config.tracking.Q(0, 0), config.tracking.Q(1, 1),
                                       config.tracking.Q(2, 2)}) << "\n";
    os << "tracking.r = " << fmt(config.tracking.R) << "\n";
    os << "tracking.rho_a = " << fmt(config.tracking.rho_a) << "\n";
    os << "tracking.rho_c = " << fmt(config.tracking.rho_c) << "\n";
    os << "tracking.eps_inv = " << fmt(config.tracking.eps_inv) << "\n";
    os << "tracking.gradient_consistent = " << fmt_bool(config.tracking.gradient_consistent) << "\n";
    os << "tracking.init_gain = " << fmt(config.tracking_init_gain) << "\n";
    os << "separation.d = " << fmt(config.separation.d) << "\n";
    os << "separation.alpha_a = " << fmt(config.separation.alpha_a) << "\n";
    os << "separation.alpha_c = " << fmt(config.separation.alpha_c) << "\n";
    os << "separation.universe_min = " << fmt(config.separation.universe_lo) << "\n";
    os << "separation.universe_max = " << fmt(config.separation.universe_hi) << "\n";
    os << "separation.centers = " << fmt(config.mf_centers) << "\n";
    os << "separation.offset = " << fmt(config.mf_offset) << "\n";
    os << "separation.literal_offsets = " << fmt_bool(config.literal_offsets) << "\n";
    os << "separation.td_deadzone = " << fmt(config.separation.td_deadzone) << "\n";
    os << "separation.deadzone_critic = " << fmt_bool(config.separation.deadzone_applies_to_critic) << "\n";
    os << "separation.critic_bound = " << fmt(config.separation.critic_bound) << "\n";
    os << "separation.euclidean_credit = " << fmt_bool(config.separation.euclidean_credit) << "\n";
    os << "separation.radial_coupling = " << fmt_bool(config.separation.radial_coupling) << "\n";
    os << "separation.actor_init = " << fmt(config.phi_init) << "\n";
    os << "separation.critic_init = " << fmt(config.Phi_init) << "\n";
    os << "separation.shared_bank = " << fmt_bool(config.shared_bank) << "\n";
    os << "consensus.c0 = " << fmt(config.c0) << "\n";
    const LeaderPhase lead = config.leader.empty() ? LeaderPhase{} : config.leader.front();
    os << "leader.kind = "
       << (lead.kind == LeaderPhase::Kind::Circular ? "circular" : "linear") << "\n";
    os << "leader.radius = " << fmt(lead.radius) << "\n";
    os << "leader.rate = " << fmt(lead.step_rate) << "\n";
    os << "leader.vx = " << fmt(lead.velocity.x()) << "\n";
    os << "leader.vy = " << fmt(lead.velocity.y()) << "\n";
    for (std::size_t e = 0; e < config.events.size(); ++e) {
        const DisturbanceEvent& ev = config.events[e];
        const std::string p = "disturbance." + std::to_string(e + 1) + ".";
        os << p << "time = " << fmt(ev.time) << "\n";
        switch (ev.kind) {
        case DisturbanceEvent::Kind::Decommission: {
            os << p << "action = decommission\n";
            os << p << "agents =";
            for (int id : ev.agents) os << ' ' << id;
            os << "\n";
            break;
        }
        case DisturbanceEvent::Kind::SwitchLeader:
            os << p << "action = switch_leader\n";
            os << p << "leader_kind = "
               << (ev.leader_kind == LeaderPhase::Kind::Circular ? "circular" : "linear") << "\n";
            if (ev.leader_kind == LeaderPhase::Kind::Circular) {
                os << p << "radius = " << fmt(ev.leader_radius) << "\n";
                os << p << "rate = " << fmt(ev.leader_rate) << "\n";
            } else {
                os << p << "vx = " << fmt(ev.leader_velocity.x()) << "\n";
                os << p << "vy = " << fmt(ev.leader_velocity.y()) << "\n";
            }
            break;
        case DisturbanceEvent::Kind::SetSafetyDistance:
            os << p << "action = set_safety_distance\n";
            os << p << "d = " << fmt(ev.new_d) << "\n";
            break;
        }
    }
    return os.str();
}

} // namespace flock
