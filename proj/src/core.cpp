#include "flock/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flock {

namespace {
bool finite2(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }
}

AgentState integrate_agent(const AgentState& state, const Vec2& u, double T,
                           double v_min, double v_max) {
    if (!finite2(state.position) || !finite2(state.velocity) || !finite2(u)) {
        throw NumericError("integrate_agent: non-finite state or control");
    }
    AgentState out = state;
    out.position = state.position + T * state.velocity;
    Vec2 v = state.velocity + T * u;
    out.velocity = Vec2(std::clamp(v.x(), v_min, v_max),
                        std::clamp(v.y(), v_min, v_max));
    return out;
}

ControlSignal aggregate_control(const Vec2& u_t, const Vec2& u_s, const Vec2& u_c) {
    ControlSignal sig;
    sig.tracking = u_t;
    sig.separation = u_s;
    sig.consensus = u_c;
    return sig;
}

FlockState synchronous_step(const FlockState& flock,
                            const std::vector<ControlSignal>& controls,
                            double v_min, double v_max) {
    if (controls.size() != flock.agents.size()) {
        throw ConfigError("synchronous_step: controls length " +
                          std::to_string(controls.size()) + " != agent count " +
                          std::to_string(flock.agents.size()));
    }
    FlockState out = flock;
    out.step_index = flock.step_index + 1;
    for (std::size_t i = 0; i < flock.agents.size(); ++i) {
        if (!flock.agents[i].active) continue;
        try {
            out.agents[i] = integrate_agent(flock.agents[i], controls[i].total(),
                                            flock.sampling_period, v_min, v_max);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (agent " +
                               std::to_string(i) + ")");
        }
    }
    return out;
}

} // namespace flock
