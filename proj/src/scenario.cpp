#include "flock/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

#include "flock/rng.hpp"

namespace flock {

namespace {

const LeaderPhase& active_phase(const LeaderSchedule& schedule, long k) {
    if (schedule.empty()) throw ConfigError("leader schedule is empty");
    const LeaderPhase* phase = &schedule.front();
    for (const auto& p : schedule) {
        if (p.start_step <= k) phase = &p;
    }
    return *phase;
}

bool log_enabled() {
    const char* lvl = std::getenv("FLOCK_LOG");
    return lvl != nullptr && std::strcmp(lvl, "quiet") != 0 && std::strcmp(lvl, "0") != 0;
}

} // namespace

Vec2 leader_position(const LeaderSchedule& schedule, long k, double T) {
    const LeaderPhase& phase = active_phase(schedule, k);
    if (phase.kind == LeaderPhase::Kind::Circular) {
        const double a = phase.step_rate * static_cast<double>(k);
        return Vec2(phase.radius * std::cos(a), phase.radius * std::sin(a));
    }
    const double dt = static_cast<double>(k - phase.start_step) * T;
    return phase.anchor + dt * phase.velocity;
}

std::pair<Vec2, Vec2> leader_state(const LeaderSchedule& schedule, long k, double T) {
    const Vec2 p0 = leader_position(schedule, k, T);
    const Vec2 p1 = leader_position(schedule, k + 1, T);
    return {p0, (p1 - p0) / T};
}

ActorGain initial_actor_gain(const ScenarioConfig& config) {
    if (config.tracking_init_gain.empty()) return ActorGain::Zero();
    Eigen::Vector3d K(config.tracking_init_gain[0], config.tracking_init_gain[1],
                      config.tracking_init_gain[2]);
    return -K.transpose();
}

CriticMatrix initial_critic_kernel(const ScenarioConfig& config) {
    if (config.tracking_init_gain.empty()) return CriticMatrix::Identity();
    Eigen::Vector3d K(config.tracking_init_gain[0], config.tracking_init_gain[1],
                      config.tracking_init_gain[2]);
    CriticMatrix Om = CriticMatrix::Identity();
    Om.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + K * K.transpose();
    Om.block<3, 1>(0, 3) = K;
    Om.block<1, 3>(3, 0) = K.transpose();
    return Om;  // positive definite; target policy equals -K E exactly
}

void validate_config(const ScenarioConfig& config) {
    if (config.n_followers < 1) throw ConfigError("scenario.followers must be >= 1");
    if (!(config.T > 0.0)) throw ConfigError("scenario.sampling_period must be > 0");
    if (config.duration < 0.0) throw ConfigError("scenario.duration must be >= 0");
    if (config.init_pos_lo > config.init_pos_hi) throw ConfigError("initial position range inverted");
    if (config.init_vel_lo > config.init_vel_hi) throw ConfigError("initial velocity range inverted");
    if (!(config.v_min < config.v_max)) throw ConfigError("velocity bounds inverted");
    if (!(config.separation.d > 0.0)) throw ConfigError("separation.d must be > 0");
    if (!(config.separation.alpha_a > 0.0 && config.separation.alpha_a < 1.0)) {
        throw ConfigError("separation.alpha_a must lie in (0,1)");
    }
    if (!(config.separation.alpha_c > 0.0 && config.separation.alpha_c < 1.0)) {
        throw ConfigError("separation.alpha_c must lie in (0,1)");
    }
    if (!(config.separation.universe_lo < config.separation.universe_hi)) {
        throw ConfigError("separation universe interval inverted");
    }
    if (config.separation.td_deadzone < 0.0) throw ConfigError("separation.td_deadzone must be >= 0");
    if (config.separation.critic_bound < 0.0) throw ConfigError("separation.critic_bound must be >= 0");
    if (config.tracking.rho_a < 0.0 || config.tracking.rho_c < 0.0) {
        throw ConfigError("tracking learning rates must be >= 0");
    }
    if (!(config.tracking.eps_inv > 0.0)) throw ConfigError("tracking.eps_inv must be > 0");
    if (!(config.tracking.R > 0.0)) throw ConfigError("tracking.R must be > 0");
    if (config.mf_centers.size() < 2) throw ConfigError("separation.centers needs >= 2 rules");
    for (std::size_t p = 1; p < config.mf_centers.size(); ++p) {
        if (!(config.mf_centers[p] > config.mf_centers[p - 1])) {
            throw ConfigError("separation.centers must be strictly increasing");
        }
    }
    if (!(config.mf_offset > 0.0)) throw ConfigError("separation.offset must be > 0");
    if (!config.phi_init.empty() && config.phi_init.size() != config.mf_centers.size()) {
        throw ConfigError("separation.phi_init length must match the rule count");
    }
    if (!config.Phi_init.empty() && config.Phi_init.size() != config.mf_centers.size()) {
        throw ConfigError("separation.Phi_init length must match the rule count");
    }
    if (!config.tracking_init_gain.empty() && config.tracking_init_gain.size() != 3) {
        throw ConfigError("tracking.init_gain needs exactly 3 entries");
    }
    if (config.c0 < 0.0) throw ConfigError("consensus.c0 must be >= 0");

    double prev_time = -1.0;
    std::set<int> decommissioned;
    for (const auto& ev : config.events) {
        if (ev.time < 0.0) throw ConfigError("disturbance times must be >= 0");
        if (ev.time < prev_time) throw ConfigError("disturbance schedule must be sorted by time");
        prev_time = ev.time;
        if (ev.kind == DisturbanceEvent::Kind::Decommission) {
            if (ev.agents.empty()) throw ConfigError("decommission event without agents");
            for (int id : ev.agents) {
                if (id < 1 || id > config.n_followers) {
                    throw ConfigError("decommission of unknown follower " + std::to_string(id));
                }
                if (!decommissioned.insert(id).second) {
                    throw ConfigError("follower " + std::to_string(id) + " decommissioned twice");
                }
            }
        } else if (ev.kind == DisturbanceEvent::Kind::SetSafetyDistance) {
            if (!(ev.new_d > 0.0)) throw ConfigError("set_safety_distance needs d > 0");
        }
    }
    if (static_cast<int>(decommissioned.size()) >= config.n_followers) {
        throw ConfigError("schedule decommissions every follower");
    }
}

ScenarioConfig builtin_scenario(const std::string& name) {
    if (name != "scenario1" && name != "scenario2") {
        throw UsageError("unknown builtin scenario '" + name + "'");
    }
    ScenarioConfig c;
    c.n_followers = 20;
    c.duration = 40.0;
    c.T = 0.1;
    c.seed = 42;
    c.tracking.Q = Eigen::Matrix3d::Identity();
    c.tracking.R = 1.0;
    c.tracking.rho_a = 1e-2;
    c.tracking.rho_c = 1e-7;
    c.tracking.gradient_consistent = true;
    c.tracking_init_gain = {17.15, -12.04, -3.08};
    c.separation.d = 2.0;
    c.separation.alpha_a = 0.1;
    c.separation.alpha_c = 0.05;
    c.separation.td_deadzone = 2.5;
    c.separation.deadzone_applies_to_critic = true;
    c.separation.critic_bound = 1.0;
    c.separation.euclidean_credit = true;
    c.separation.radial_coupling = true;
    c.phi_init = {0.0, 5.0, 5.0, -1.0, 0.0};
    c.Phi_init = {-1.0, -1.0, -1.0, -1.0, -1.0};
    c.c0 = 3.0;
    c.leader = {LeaderPhase{}};
    if (name == "scenario2") {
        DisturbanceEvent cut;
        cut.time = 10.0;
        cut.kind = DisturbanceEvent::Kind::Decommission;
        cut.agents = {1, 2, 3, 4};
        DisturbanceEvent turn;
        turn.time = 20.0;
        turn.kind = DisturbanceEvent::Kind::SwitchLeader;
        turn.leader_kind = LeaderPhase::Kind::Linear;
        turn.leader_velocity = Vec2(1.7321, 1.0);
        DisturbanceEvent widen;
        widen.time = 30.0;
        widen.kind = DisturbanceEvent::Kind::SetSafetyDistance;
        widen.new_d = 2.5;
        c.events = {cut, turn, widen};
    }
    return c;
}

MetricRow compute_metrics(const FlockState& flock, double d, long k) {
    const std::size_t leader = flock.leader_index;
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < flock.agents.size(); ++i) {
        if (i != leader && flock.agents[i].active) act.push_back(i);
    }
    if (act.empty()) throw NumericError("no active followers left at step " + std::to_string(k));
    const auto n = static_cast<double>(act.size());
    MetricRow row;
    row.k = k;
    row.t = static_cast<double>(k) * flock.sampling_period;

    std::vector<double> dist_i, err_i, speed_i;
    dist_i.reserve(act.size());
    err_i.reserve(act.size());
    speed_i.reserve(act.size());
    for (std::size_t i : act) {
        dist_i.push_back((flock.agents[i].position - flock.agents[leader].position).norm());
        double err = 0.0;
        if (act.size() > 1) {
            for (std::size_t j : act) {
                if (j == i) continue;
                err += (flock.agents[j].position - flock.agents[i].position).norm() - d;
            }
            err /= (n - 1.0);
        }
        err_i.push_back(err);
        speed_i.push_back(flock.agents[i].velocity.norm());
    }
    // population standard deviation, two-pass for numerical headroom
    auto mean_of = [n](const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s / n;
    };
    auto std_of = [n](const std::vector<double>& xs, double mu) {
        double s = 0.0;
        for (double x : xs) s += (x - mu) * (x - mu);
        return std::sqrt(s / n);
    };
    row.O_t = mean_of(dist_i);
    row.O_s = mean_of(err_i);
    row.O_v = mean_of(speed_i);
    row.std_t = std_of(dist_i, row.O_t);
    row.std_s = std_of(err_i, row.O_s);
    row.std_v = std_of(speed_i, row.O_v);
    return row;
}

FlockState sample_initial_flock(const ScenarioConfig& config) {
    FlockState flock;
    flock.sampling_period = config.T;
    flock.leader_index = 0;
    flock.agents.resize(static_cast<std::size_t>(config.n_followers) + 1);
    auto [lp, lv] = leader_state(config.leader, 0, config.T);
    flock.agents[0].position = lp;
    flock.agents[0].velocity = lv;
    SplitMix64 rng(config.seed);
    for (int i = 1; i <= config.n_followers; ++i) {
        auto& a = flock.agents[static_cast<std::size_t>(i)];
        a.position.x() = rng.uniform(config.init_pos_lo, config.init_pos_hi);
        a.position.y() = rng.uniform(config.init_pos_lo, config.init_pos_hi);
        a.velocity.x() = rng.uniform(config.init_vel_lo, config.init_vel_hi);
        a.velocity.y() = rng.uniform(config.init_vel_lo, config.init_vel_hi);
    }
    return flock;
}

double cumulative_cost(const RunRecord& record, int agent, int axis) {
    if (agent < 1 || agent >= static_cast<int>(record.cumulative_costs.size())) {
        throw ConfigError("cumulative_cost: unknown follower " + std::to_string(agent));
    }
    if (axis < 0 || axis > 1) throw ConfigError("cumulative_cost: axis must be 0 or 1");
    return record.cumulative_costs[static_cast<std::size_t>(agent)][static_cast<std::size_t>(axis)];
}

namespace {

struct UnitStore {
    // per ordered pair (i, j) per axis; shared mode collapses j
    int n = 0;
    bool shared = false;
    std::vector<PairFuzzyUnit> units;

    UnitStore(int n_followers, bool shared_mode, const FuzzyBank& bank0)
        : n(n_followers), shared(shared_mode) {
        const std::size_t count = shared
            ? static_cast<std::size_t>(n) * 2
            : static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 2;
        units.assign(count, PairFuzzyUnit(bank0));
    }

    PairFuzzyUnit& at(int i, int j, int ax) {
        const std::size_t ii = static_cast<std::size_t>(i - 1);
        const std::size_t jj = static_cast<std::size_t>(j - 1);
        if (shared) return units[ii * 2 + static_cast<std::size_t>(ax)];
        return units[(ii * static_cast<std::size_t>(n) + jj) * 2 + static_cast<std::size_t>(ax)];
    }

    void freeze_agent(int id) {
        if (shared) {
            const std::size_t ii = static_cast<std::size_t>(id - 1);
            units[ii * 2].freeze();
            units[ii * 2 + 1].freeze();
            return;
        }
        for (int j = 1; j <= n; ++j) {
            if (j == id) continue;
            for (int ax = 0; ax < 2; ++ax) {
                at(id, j, ax).freeze();
                at(j, id, ax).freeze();
            }
        }
    }
};

} // namespace

RunRecord run_scenario(const ScenarioConfig& config) {
    validate_config(config);
    const long steps = std::lround(config.duration / config.T);
    const int N = config.n_followers;

    FlockState flock = sample_initial_flock(config);
    LeaderSchedule schedule = config.leader;
    SeparationParams sep = config.separation;

    const ActorGain omega0 = initial_actor_gain(config);
    const CriticMatrix Omega0 = initial_critic_kernel(config);
    std::vector<std::array<AxisTracker, 2>> trackers;
    trackers.reserve(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        trackers.push_back({AxisTracker(omega0, Omega0), AxisTracker(omega0, Omega0)});
    }

    const auto P = static_cast<Eigen::Index>(config.mf_centers.size());
    Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(P);
    Eigen::VectorXd Phi0 = Eigen::VectorXd::Zero(P);
    for (Eigen::Index p = 0; p < P; ++p) {
        if (!config.phi_init.empty()) phi0(p) = config.phi_init[static_cast<std::size_t>(p)];
        if (!config.Phi_init.empty()) Phi0(p) = config.Phi_init[static_cast<std::size_t>(p)];
    }
    const double offset = config.literal_offsets ? 1.5 : config.mf_offset;
    UnitStore store(N, config.shared_bank, make_bank(config.mf_centers, offset, phi0, Phi0));

    RunRecord record;
    record.steps = steps;
    record.metrics.reserve(static_cast<std::size_t>(steps) + 1);

    auto active_followers = [&]() {
        std::vector<int> act;
        for (int i = 1; i <= N; ++i) {
            if (flock.agents[static_cast<std::size_t>(i)].active) act.push_back(i);
        }
        return act;
    };

    auto record_epoch = [&](long k) {
        const auto act = active_followers();
        TopologyEpoch ep;
        ep.step = k;
        ep.n_active = static_cast<int>(act.size());
        if (act.size() > 1) {
            const FlockGraph graph = complete_graph(static_cast<Eigen::Index>(act.size()), config.c0);
            const Eigen::MatrixXd L = laplacian(graph);
            ep.lambda2 = algebraic_connectivity(L);
            ep.lambda_max = spectral_radius(L);
        }
        record.epochs.push_back(ep);
    };
    record_epoch(0);
    if (!record.epochs.empty() && config.consensus_enabled &&
        config.T * record.epochs.front().lambda_max >= 2.0 && log_enabled()) {
        std::fprintf(stderr,
                     "[flock] warning: T*lambda_max = %.6g >= 2, explicit consensus step may be unstable\n",
                     config.T * record.epochs.front().lambda_max);
    }

    std::vector<DisturbanceEvent> pending = config.events;
    std::size_t next_event = 0;

    // scratch for the learning phase: snapshot inputs per ordered pair per axis
    std::vector<double> z_cache(static_cast<std::size_t>(N) * static_cast<std::size_t>(N) * 2, 0.0);
    std::vector<double> sig_cache(z_cache.size(), 1.0);
    auto cache_idx = [N](int i, int j, int ax) {
        return (static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(N) +
                static_cast<std::size_t>(j - 1)) * 2 + static_cast<std::size_t>(ax);
    };

    for (long k = 0; k <= steps; ++k) {
        // disturbances strictly after their scheduled time
        while (next_event < pending.size() &&
               static_cast<double>(k) * config.T > pending[next_event].time + 1e-12) {
            const DisturbanceEvent& ev = pending[next_event];
            AppliedEvent ae;
            ae.step = k;
            ae.time = ev.time;
            if (ev.kind == DisturbanceEvent::Kind::Decommission) {
                std::ostringstream os;
                os << "decommission";
                for (int id : ev.agents) {
                    flock.agents[static_cast<std::size_t>(id)].active = false;
                    store.freeze_agent(id);
                    os << ' ' << id;
                }
                ae.description = os.str();
                record_epoch(k);
            } else if (ev.kind == DisturbanceEvent::Kind::SwitchLeader) {
                LeaderPhase phase;
                phase.kind = ev.leader_kind;
                phase.start_step = k + 1;
                phase.radius = ev.leader_radius;
                phase.step_rate = ev.leader_rate;
                phase.velocity = ev.leader_velocity;
                phase.anchor = leader_position(schedule, k + 1, config.T);
                schedule.push_back(phase);
                std::ostringstream os;
                os << "switch_leader "
                   << (ev.leader_kind == LeaderPhase::Kind::Linear ? "linear" : "circular");
                ae.description = os.str();
            } else {
                sep.d = ev.new_d;
                std::ostringstream os;
                os << "set_safety_distance " << ev.new_d;
                ae.description = os.str();
            }
            record.applied_events.push_back(ae);
            ++next_event;
        }

        record.metrics.push_back(compute_metrics(flock, sep.d, k));

        const auto act = active_followers();
        const auto n_act = static_cast<Eigen::Index>(act.size());

        std::vector<ControlSignal> controls(flock.agents.size());
        if (k == steps) {
            for (int i = 0; i <= N; ++i) {
                const auto& a = flock.agents[static_cast<std::size_t>(i)];
                StateRow srow;
                srow.k = k;
                srow.agent = i;
                srow.active = a.active;
                srow.x = a.position.x();
                srow.y = a.position.y();
                srow.vx = a.velocity.x();
                srow.vy = a.velocity.y();
                record.states.push_back(srow);
            }
            break;
        }

        // ---- control phase against the step-k snapshot ----
        const Vec2 v_cmd_next = leader_state(schedule, k + 1, config.T).second;
        controls[0].tracking = (v_cmd_next - flock.agents[0].velocity) / config.T;

        FlockGraph graph;
        Eigen::MatrixXd vel_act(n_act, 2);
        if (config.consensus_enabled && n_act > 1) {
            graph = complete_graph(n_act, config.c0);
            for (Eigen::Index r = 0; r < n_act; ++r) {
                const auto& a = flock.agents[static_cast<std::size_t>(act[static_cast<std::size_t>(r)])];
                vel_act(r, 0) = a.velocity.x();
                vel_act(r, 1) = a.velocity.y();
            }
        }

        for (Eigen::Index r = 0; r < n_act; ++r) {
            const int i = act[static_cast<std::size_t>(r)];
            const auto& self = flock.agents[static_cast<std::size_t>(i)];
            ControlSignal& u = controls[static_cast<std::size_t>(i)];
            for (int ax = 0; ax < 2; ++ax) {
                if (config.tracking_enabled) {
                    const double e = self.position(ax) - flock.agents[0].position(ax);
                    u.tracking(ax) = trackers[static_cast<std::size_t>(i)][static_cast<std::size_t>(ax)].control(e);
                }
                if (config.separation_enabled && act.size() > 1) {
                    std::vector<double> outputs;
                    outputs.reserve(act.size() - 1);
                    for (int j : act) {
                        if (j == i) continue;
                        const auto& other = flock.agents[static_cast<std::size_t>(j)];
                        double uo;
                        double z, sig;
                        if (sep.radial_coupling) {
                            const double dist = (self.position - other.position).norm();
                            z = std::clamp(dist - sep.d, sep.universe_lo, sep.universe_hi);
                            sig = z >= 0.0 ? 1.0 : -1.0;
                            if (config.shared_bank) {
                                uo = evaluate_bank(store.at(i, j, ax).bank(), z, sep.eps_fire);
                            } else {
                                uo = store.at(i, j, ax).control(z, sig);
                            }
                            uo = dist > 1e-12 ? uo * (self.position(ax) - other.position(ax)) / dist : 0.0;
                        } else {
                            z = fuzzy_input(self.position(ax), other.position(ax), sep.d,
                                            sep.universe_lo, sep.universe_hi);
                            sig = (self.position - other.position).norm() >= sep.d ? 1.0 : -1.0;
                            if (config.shared_bank) {
                                uo = evaluate_bank(store.at(i, j, ax).bank(), z, sep.eps_fire);
                            } else {
                                uo = store.at(i, j, ax).control(z, sig);
                            }
                        }
                        z_cache[cache_idx(i, j, ax)] = z;
                        sig_cache[cache_idx(i, j, ax)] = sig;
                        outputs.push_back(uo);
                    }
                    u.separation(ax) = aggregate_separation(outputs);
                }
                if (config.consensus_enabled && n_act > 1) {
                    u.consensus(ax) = consensus_control(r, vel_act.col(ax), graph);
                }
            }
        }

        for (int i = 0; i <= N; ++i) {
            const auto& a = flock.agents[static_cast<std::size_t>(i)];
            const ControlSignal& u = controls[static_cast<std::size_t>(i)];
            StateRow srow;
            srow.k = k;
            srow.agent = i;
            srow.active = a.active;
            srow.x = a.position.x();
            srow.y = a.position.y();
            srow.vx = a.velocity.x();
            srow.vy = a.velocity.y();
            srow.ut_x = u.tracking.x();
            srow.ut_y = u.tracking.y();
            srow.us_x = u.separation.x();
            srow.us_y = u.separation.y();
            srow.uc_x = u.consensus.x();
            srow.uc_y = u.consensus.y();
            record.states.push_back(srow);
        }

        // ---- synchronous world step ----
        try {
            flock = synchronous_step(flock, controls, config.v_min, config.v_max);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at step " + std::to_string(k));
        }

        // ---- learning phase on the (k, k+1) transition ----
        for (int i : act) {
            const auto& self = flock.agents[static_cast<std::size_t>(i)];
            for (int ax = 0; ax < 2; ++ax) {
                if (config.tracking_enabled) {
                    const double e_next = self.position(ax) - flock.agents[0].position(ax);
                    try {
                        trackers[static_cast<std::size_t>(i)][static_cast<std::size_t>(ax)].learn(e_next, config.tracking);
                    } catch (const NumericError& e) {
                        throw NumericError(std::string(e.what()) + " (agent " +
                                           std::to_string(i) + " axis " + std::to_string(ax) +
                                           " at step " + std::to_string(k) + ")");
                    }
                }
                if (config.separation_enabled && act.size() > 1) {
                    for (int j : act) {
                        if (j == i) continue;
                        const auto& other = flock.agents[static_cast<std::size_t>(j)];
                        double z_next;
                        if (sep.radial_coupling) {
                            z_next = std::clamp((self.position - other.position).norm() - sep.d,
                                                sep.universe_lo, sep.universe_hi);
                        } else {
                            z_next = fuzzy_input(self.position(ax), other.position(ax), sep.d,
                                                 sep.universe_lo, sep.universe_hi);
                        }
                        try {
                            PairFuzzyUnit& unit = store.at(i, j, ax);
                            if (config.shared_bank) {
                                if (!unit.frozen()) {
                                    learn_bank(unit.bank(), z_cache[cache_idx(i, j, ax)],
                                               sig_cache[cache_idx(i, j, ax)], z_next, sep);
                                }
                            } else {
                                unit.learn(z_next, sep);
                            }
                        } catch (const NumericError& e) {
                            throw NumericError(std::string(e.what()) + " (pair " +
                                               std::to_string(i) + "," + std::to_string(j) +
                                               " axis " + std::to_string(ax) + " at step " +
                                               std::to_string(k) + ")");
                        }
                    }
                }
            }
        }
    }

    record.cumulative_costs.assign(static_cast<std::size_t>(N) + 1, {0.0, 0.0});
    for (int i = 1; i <= N; ++i) {
        for (int ax = 0; ax < 2; ++ax) {
            const auto& tr = trackers[static_cast<std::size_t>(i)][static_cast<std::size_t>(ax)];
            record.cumulative_costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(ax)] =
                tr.cumulative_cost();
            record.monotonicity_violations += tr.monotonicity_violations();
        }
    }
    return record;
}

} // namespace flock
