#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flock/consensus.hpp"
#include "flock/core.hpp"
#include "flock/fuzzy.hpp"
#include "flock/tracking.hpp"

namespace flock {

struct LeaderPhase {
    enum class Kind { Circular, Linear };
    Kind kind = Kind::Circular;
    long start_step = 0;
    double radius = 5.0;
    double step_rate = 0.03;  // rad per step
    Vec2 velocity{0.0, 0.0};  // linear kind
    Vec2 anchor{0.0, 0.0};    // position at start_step (linear kind)
};

using LeaderSchedule = std::vector<LeaderPhase>;

Vec2 leader_position(const LeaderSchedule& schedule, long k, double T);
std::pair<Vec2, Vec2> leader_state(const LeaderSchedule& schedule, long k, double T);

struct DisturbanceEvent {
    enum class Kind { Decommission, SwitchLeader, SetSafetyDistance };
    double time = 0.0;
    Kind kind = Kind::Decommission;
    std::vector<int> agents;       // decommission: follower ids
    LeaderPhase::Kind leader_kind = LeaderPhase::Kind::Linear;
    Vec2 leader_velocity{0.0, 0.0};
    double leader_radius = 5.0;
    double leader_rate = 0.03;
    double new_d = 0.0;            // set_safety_distance
};

struct ScenarioConfig {
    int n_followers = 20;
    double duration = 40.0;
    double T = 0.1;
    std::uint64_t seed = 42;
    double init_pos_lo = -5.0, init_pos_hi = 5.0;
    double init_vel_lo = 0.0, init_vel_hi = 1.0;
    double v_min = -10.0, v_max = 10.0;

    TrackingParams tracking;
    // Optional stabilizing gain K: actor starts at -K and the critic kernel is
    // assembled so that its target policy is exactly -K E. Empty = neutral
    // start (identity critic, zero actor).
    std::vector<double> tracking_init_gain;

    SeparationParams separation;
    std::vector<double> mf_centers{-6.0, -3.0, 0.0, 3.0, 6.0};
    double mf_offset = 3.0;
    bool literal_offsets = false;  // reproduce the printed 1.5 m offsets
    std::vector<double> phi_init;  // empty = zeros
    std::vector<double> Phi_init;  // empty = zeros
    bool shared_bank = false;

    double c0 = 1.0;

    bool tracking_enabled = true;
    bool separation_enabled = true;
    bool consensus_enabled = true;

    LeaderSchedule leader{LeaderPhase{}};
    std::vector<DisturbanceEvent> events;
};

void validate_config(const ScenarioConfig& config);
ScenarioConfig builtin_scenario(const std::string& name);

ActorGain initial_actor_gain(const ScenarioConfig& config);
CriticMatrix initial_critic_kernel(const ScenarioConfig& config);

struct MetricRow {
    long k = 0;
    double t = 0.0;
    double O_t = 0.0, O_s = 0.0, O_v = 0.0;
    double std_t = 0.0, std_s = 0.0, std_v = 0.0;
};

struct StateRow {
    long k = 0;
    int agent = 0;
    bool active = true;
    double x = 0.0, y = 0.0, vx = 0.0, vy = 0.0;
    double ut_x = 0.0, ut_y = 0.0;
    double us_x = 0.0, us_y = 0.0;
    double uc_x = 0.0, uc_y = 0.0;
};

struct TopologyEpoch {
    long step = 0;
    int n_active = 0;
    double lambda2 = 0.0;
    double lambda_max = 0.0;
};

struct AppliedEvent {
    long step = 0;
    double time = 0.0;
    std::string description;
};

struct RunRecord {
    std::vector<MetricRow> metrics;
    std::vector<StateRow> states;
    std::vector<TopologyEpoch> epochs;
    std::vector<AppliedEvent> applied_events;
    // cumulative tracking cost, row = follower id (index 0 unused = leader)
    std::vector<std::array<double, 2>> cumulative_costs;
    long monotonicity_violations = 0;
    long steps = 0;
};

MetricRow compute_metrics(const FlockState& flock, double d, long k);
FlockState sample_initial_flock(const ScenarioConfig& config);
double cumulative_cost(const RunRecord& record, int agent, int axis);

RunRecord run_scenario(const ScenarioConfig& config);

} // namespace flock
