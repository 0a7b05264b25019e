#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "flock/errors.hpp"

namespace flock {

using Vec2 = Eigen::Vector2d;

/// Kinematic state of one agent. Decommissioned agents stay in the list
/// with active=false so indices remain stable for logging.
struct AgentState {
    Vec2 position{0.0, 0.0};  // m
    Vec2 velocity{0.0, 0.0};  // m/s
    bool active = true;
};

/// One agent's control for one step, kept per-term for logging.
struct ControlSignal {
    Vec2 tracking{0.0, 0.0};    // m/s^2
    Vec2 separation{0.0, 0.0};  // m/s^2
    Vec2 consensus{0.0, 0.0};   // m/s^2

    Vec2 total() const { return tracking + separation + consensus; }
};

/// Synchronous world snapshot: all agents share the same step index.
struct FlockState {
    long step_index = 0;
    std::vector<AgentState> agents;
    std::size_t leader_index = 0;
    double sampling_period = 0.1;  // s
};

/// Advance one agent by explicit Euler: position with the pre-update
/// velocity, then the velocity update, clamped componentwise.
AgentState integrate_agent(const AgentState& state, const Vec2& u, double T,
                           double v_min, double v_max);

ControlSignal aggregate_control(const Vec2& u_t, const Vec2& u_s, const Vec2& u_c);

/// Step the whole flock from a step-k snapshot: active agents integrate,
/// inactive agents are frozen, step index increments.
FlockState synchronous_step(const FlockState& flock,
                            const std::vector<ControlSignal>& controls,
                            double v_min, double v_max);

} // namespace flock
