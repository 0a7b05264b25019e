#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "flock/scenario.hpp"

using namespace flock;

namespace {

// rebuild the step-k flock snapshot from the logged state rows
FlockState snapshot_at(const RunRecord& rec, long k, int n_agents, double T) {
    FlockState f;
    f.step_index = k;
    f.sampling_period = T;
    f.leader_index = 0;
    f.agents.resize(static_cast<std::size_t>(n_agents));
    for (const StateRow& row : rec.states) {
        if (row.k != k) continue;
        auto& a = f.agents[static_cast<std::size_t>(row.agent)];
        a.position = Vec2(row.x, row.y);
        a.velocity = Vec2(row.vx, row.vy);
        a.active = row.active;
    }
    return f;
}

} // namespace

TEST_CASE("leader: circular trajectory and its discrete-difference velocity") {
    const LeaderSchedule sched{LeaderPhase{}};
    const auto [p0, v0] = leader_state(sched, 0, 0.1);
    CHECK(p0.x() == 5.0);
    CHECK(p0.y() == 0.0);
    CHECK(v0.x() == (5.0 * std::cos(0.03) - 5.0) / 0.1);
    CHECK(v0.y() == (5.0 * std::sin(0.03)) / 0.1);
    const auto [p7, v7] = leader_state(sched, 7, 0.1);
    CHECK(p7.x() == 5.0 * std::cos(0.21));
    CHECK(p7.y() == 5.0 * std::sin(0.21));
    CHECK(v7.x() == (5.0 * std::cos(0.03 * 8.0) - 5.0 * std::cos(0.21)) / 0.1);
}

TEST_CASE("leader: zero angular rate parks the reference") {
    LeaderSchedule sched{LeaderPhase{}};
    sched.front().step_rate = 0.0;
    for (long k : {0L, 1L, 57L, 400L}) {
        const auto [p, v] = leader_state(sched, k, 0.1);
        CHECK(p.x() == 5.0);
        CHECK(p.y() == 0.0);
        CHECK(v.x() == 0.0);
        CHECK(v.y() == 0.0);
    }
}

TEST_CASE("leader: linear phase continues from the switch point at fixed velocity") {
    LeaderSchedule sched{LeaderPhase{}};
    LeaderPhase lin;
    lin.kind = LeaderPhase::Kind::Linear;
    lin.start_step = 201;
    lin.velocity = Vec2(1.7321, 1.0);
    lin.anchor = leader_position(sched, 201, 0.1);
    sched.push_back(lin);

    CHECK(leader_position(sched, 201, 0.1) == lin.anchor);
    CHECK(leader_position(sched, 200, 0.1).x() == 5.0 * std::cos(0.03 * 200.0));
    for (long k : {201L, 250L, 399L}) {
        const auto [p, v] = leader_state(sched, k, 0.1);
        (void)p;
        CHECK(v.x() == doctest::Approx(1.7321).epsilon(1e-9));
        CHECK(v.y() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("initial flock sampling respects the declared ranges") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.seed = 99;
    const FlockState f = sample_initial_flock(cfg);
    REQUIRE(f.agents.size() == 21);
    for (int i = 1; i <= 20; ++i) {
        const auto& a = f.agents[static_cast<std::size_t>(i)];
        CHECK(a.position.x() >= -5.0);
        CHECK(a.position.x() <= 5.0);
        CHECK(a.position.y() >= -5.0);
        CHECK(a.position.y() <= 5.0);
        CHECK(a.velocity.x() >= 0.0);
        CHECK(a.velocity.x() <= 1.0);
        CHECK(a.velocity.y() >= 0.0);
        CHECK(a.velocity.y() <= 1.0);
    }
    // leader starts on its commanded trajectory
    const auto [lp, lv] = leader_state(cfg.leader, 0, cfg.T);
    CHECK(f.agents[0].position == lp);
    CHECK(f.agents[0].velocity == lv);
}

TEST_CASE("initial flock sampling is reproducible and range-degenerate-safe") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.seed = 7;
    const FlockState a = sample_initial_flock(cfg);
    const FlockState b = sample_initial_flock(cfg);
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK(a.agents[i].position == b.agents[i].position);
        CHECK(a.agents[i].velocity == b.agents[i].velocity);
    }
    cfg.init_pos_lo = cfg.init_pos_hi = 1.25;
    cfg.init_vel_lo = cfg.init_vel_hi = 0.5;
    const FlockState c = sample_initial_flock(cfg);
    for (int i = 1; i <= 20; ++i) {
        CHECK(c.agents[static_cast<std::size_t>(i)].position == Vec2(1.25, 1.25));
        CHECK(c.agents[static_cast<std::size_t>(i)].velocity == Vec2(0.5, 0.5));
    }
}

TEST_CASE("builtin configurations carry the published parameter set") {
    const ScenarioConfig c1 = builtin_scenario("scenario1");
    CHECK(c1.n_followers == 20);
    CHECK(c1.T == 0.1);
    CHECK(c1.duration == 40.0);
    CHECK(c1.tracking.Q == Eigen::Matrix3d::Identity());
    CHECK(c1.tracking.R == 1.0);
    CHECK(c1.tracking.rho_a == 1e-2);
    CHECK(c1.tracking.rho_c == 1e-7);
    CHECK(c1.separation.alpha_a == 0.1);
    CHECK(c1.separation.alpha_c == 0.05);
    CHECK(c1.separation.d == 2.0);
    CHECK(c1.separation.universe_lo == -7.5);
    CHECK(c1.separation.universe_hi == 7.5);
    CHECK(c1.mf_centers == std::vector<double>{-6.0, -3.0, 0.0, 3.0, 6.0});
    CHECK(c1.v_min == -10.0);
    CHECK(c1.v_max == 10.0);
    CHECK(c1.events.empty());
    CHECK_NOTHROW(validate_config(c1));

    const ScenarioConfig c2 = builtin_scenario("scenario2");
    REQUIRE(c2.events.size() == 3);
    CHECK(c2.events[0].time == 10.0);
    CHECK(c2.events[0].kind == DisturbanceEvent::Kind::Decommission);
    CHECK(c2.events[0].agents == std::vector<int>{1, 2, 3, 4});
    CHECK(c2.events[1].time == 20.0);
    CHECK(c2.events[1].kind == DisturbanceEvent::Kind::SwitchLeader);
    CHECK(c2.events[1].leader_velocity == Vec2(1.7321, 1.0));
    CHECK(c2.events[2].time == 30.0);
    CHECK(c2.events[2].kind == DisturbanceEvent::Kind::SetSafetyDistance);
    CHECK(c2.events[2].new_d == 2.5);
    CHECK_NOTHROW(validate_config(c2));

    CHECK_THROWS_AS(builtin_scenario("scenario3"), UsageError);
}

TEST_CASE("config validation rejects out-of-range settings") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.separation.d = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = builtin_scenario("scenario1");
    cfg.duration = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = builtin_scenario("scenario2");
    std::swap(cfg.events[0], cfg.events[2]);  // unsorted schedule
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = builtin_scenario("scenario2");
    cfg.events[0].agents = {21};  // unknown follower
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = builtin_scenario("scenario2");
    cfg.events[0].agents = {3, 3};  // duplicate decommission
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("compute_metrics: hand-checked values") {
    FlockState f;
    f.sampling_period = 0.1;
    f.leader_index = 0;
    f.agents.resize(4);
    f.agents[0].position = Vec2(0.0, 0.0);
    f.agents[0].velocity = Vec2(50.0, 0.0);  // leader speed must not leak in
    f.agents[1].position = Vec2(0.0, 0.0);
    f.agents[1].velocity = Vec2(1.0, 0.0);
    f.agents[2].position = Vec2(2.0, 0.0);
    f.agents[2].velocity = Vec2(2.0, 0.0);
    f.agents[3].position = Vec2(0.0, 2.0);
    f.agents[3].velocity = Vec2(3.0, 0.0);
    const MetricRow row = compute_metrics(f, 2.0, 5);
    CHECK(row.k == 5);
    CHECK(row.t == 0.5);
    // distances to the reference: 0, 2, 2
    CHECK(row.O_t == doctest::Approx((0.0 + 2.0 + 2.0) / 3.0).epsilon(1e-15));
    CHECK(row.O_v == 2.0);
    // pair separations: 1-2: 0, 1-3: 0, 2-3: 2*sqrt(2)-2
    const double e23 = 2.0 * std::sqrt(2.0) - 2.0;
    const double os1 = 0.0, os2 = e23 / 2.0, os3 = e23 / 2.0;
    CHECK(row.O_s == doctest::Approx((os1 + os2 + os3) / 3.0).epsilon(1e-14));
    const double mv = 2.0;
    CHECK(row.std_v == doctest::Approx(std::sqrt(((1 - mv) * (1 - mv) + 0 + (3 - mv) * (3 - mv)) / 3.0))
                           .epsilon(1e-14));
}

TEST_CASE("compute_metrics: followers on the reference give zero tracking error") {
    FlockState f;
    f.leader_index = 0;
    f.agents.resize(3);
    f.agents[0].position = Vec2(1.0, 1.0);
    f.agents[1].position = Vec2(1.0, 1.0);
    f.agents[2].position = Vec2(1.0, 1.0);
    const MetricRow row = compute_metrics(f, 2.0, 0);
    CHECK(row.O_t == 0.0);
    CHECK(row.std_t == 0.0);
}

TEST_CASE("compute_metrics: a pair at the safety distance has zero separation error") {
    FlockState f;
    f.leader_index = 0;
    f.agents.resize(3);
    f.agents[1].position = Vec2(0.0, 0.0);
    f.agents[2].position = Vec2(2.0, 0.0);
    const MetricRow row = compute_metrics(f, 2.0, 0);
    CHECK(row.O_s == 0.0);
    CHECK(row.std_s == 0.0);
}

TEST_CASE("compute_metrics: no active followers is a hard error") {
    FlockState f;
    f.leader_index = 0;
    f.agents.resize(3);
    f.agents[1].active = false;
    f.agents[2].active = false;
    CHECK_THROWS_AS(compute_metrics(f, 2.0, 0), NumericError);
}

TEST_CASE("zero-duration run emits exactly the initial row") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 0.0;
    const RunRecord rec = run_scenario(cfg);
    CHECK(rec.steps == 0);
    CHECK(rec.metrics.size() == 1);
    CHECK(rec.states.size() == 21);
    CHECK(rec.metrics.front().k == 0);
}

TEST_CASE("repeated runs of the same configuration are identical") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 3.0;
    cfg.seed = 5;
    const RunRecord a = run_scenario(cfg);
    const RunRecord b = run_scenario(cfg);
    REQUIRE(a.metrics.size() == b.metrics.size());
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].O_t == b.metrics[i].O_t);
        CHECK(a.metrics[i].O_s == b.metrics[i].O_s);
        CHECK(a.metrics[i].std_v == b.metrics[i].std_v);
    }
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(a.states[i].x == b.states[i].x);
        CHECK(a.states[i].vx == b.states[i].vx);
        CHECK(a.states[i].ut_x == b.states[i].ut_x);
        CHECK(a.states[i].us_x == b.states[i].us_x);
        CHECK(a.states[i].uc_x == b.states[i].uc_x);
    }
    CHECK(a.monotonicity_violations == b.monotonicity_violations);
}

TEST_CASE("disturbances land on the first step strictly past their times") {
    ScenarioConfig cfg = builtin_scenario("scenario2");
    cfg.seed = 7;
    const RunRecord rec = run_scenario(cfg);
    REQUIRE(rec.applied_events.size() == 3);
    CHECK(rec.applied_events[0].step == 101);
    CHECK(rec.applied_events[1].step == 201);
    CHECK(rec.applied_events[2].step == 301);

    // topology epochs: full flock, then the post-decommission graph
    REQUIRE(rec.epochs.size() == 2);
    CHECK(rec.epochs[0].n_active == 20);
    CHECK(rec.epochs[0].lambda2 == doctest::Approx(3.0 * 20.0 / 19.0).epsilon(1e-8));
    CHECK(rec.epochs[1].step == 101);
    CHECK(rec.epochs[1].n_active == 16);
    CHECK(rec.epochs[1].lambda2 == doctest::Approx(3.0 * 16.0 / 15.0).epsilon(1e-8));

    // decommissioned followers stay frozen afterwards
    const FlockState before = snapshot_at(rec, 101, 21, cfg.T);
    const FlockState after = snapshot_at(rec, 200, 21, cfg.T);
    for (int i = 1; i <= 4; ++i) {
        CHECK_FALSE(before.agents[static_cast<std::size_t>(i)].active);
        CHECK(after.agents[static_cast<std::size_t>(i)].position ==
              before.agents[static_cast<std::size_t>(i)].position);
    }
}

TEST_CASE("the safety-distance change reshapes the metrics immediately") {
    ScenarioConfig cfg = builtin_scenario("scenario2");
    cfg.seed = 7;
    const RunRecord rec = run_scenario(cfg);
    const FlockState snap = snapshot_at(rec, 301, 21, cfg.T);
    const MetricRow& logged = rec.metrics[301];
    const MetricRow wide = compute_metrics(snap, 2.5, 301);
    const MetricRow narrow = compute_metrics(snap, 2.0, 301);
    CHECK(logged.O_s == wide.O_s);
    CHECK(logged.O_s != narrow.O_s);
    // one step earlier the old distance is still in force
    const FlockState prev = snapshot_at(rec, 300, 21, cfg.T);
    CHECK(rec.metrics[300].O_s == compute_metrics(prev, 2.0, 300).O_s);
}

TEST_CASE("metric rows are recomputable from the logged states") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 5.0;
    cfg.seed = 2;
    const RunRecord rec = run_scenario(cfg);
    for (long k : {0L, 17L, 50L}) {
        const FlockState snap = snapshot_at(rec, k, 21, cfg.T);
        const MetricRow again = compute_metrics(snap, 2.0, k);
        const MetricRow& logged = rec.metrics[static_cast<std::size_t>(k)];
        CHECK(logged.O_t == again.O_t);
        CHECK(logged.O_s == again.O_s);
        CHECK(logged.O_v == again.O_v);
        CHECK(logged.std_t == again.std_t);
        CHECK(logged.std_s == again.std_s);
        CHECK(logged.std_v == again.std_v);
    }
}

TEST_CASE("pure consensus preserves the mean follower velocity") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.tracking_enabled = false;
    cfg.separation_enabled = false;
    cfg.seed = 11;
    const RunRecord rec = run_scenario(cfg);
    double mean0_x = 0.0, mean0_y = 0.0;
    for (int i = 1; i <= 20; ++i) {
        mean0_x += rec.states[static_cast<std::size_t>(i)].vx;
        mean0_y += rec.states[static_cast<std::size_t>(i)].vy;
    }
    mean0_x /= 20.0;
    mean0_y /= 20.0;
    const double scale = std::max({1.0, std::abs(mean0_x), std::abs(mean0_y)});
    for (long k = 0; k <= rec.steps; ++k) {
        double mx = 0.0, my = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const StateRow& row = rec.states[static_cast<std::size_t>(k) * 21u + static_cast<std::size_t>(i)];
            mx += row.vx;
            my += row.vy;
        }
        CHECK(std::abs(mx / 20.0 - mean0_x) <= 1e-9 * scale);
        CHECK(std::abs(my / 20.0 - mean0_y) <= 1e-9 * scale);
    }
}

TEST_CASE("cumulative tracking cost matches a replay from the logged data") {
    ScenarioConfig cfg = builtin_scenario("scenario1");
    cfg.duration = 4.0;
    cfg.seed = 13;
    const RunRecord rec = run_scenario(cfg);
    // replay follower 3, x axis: windows from logged errors, controls as logged
    const Eigen::Matrix3d Q = cfg.tracking.Q;
    double expect = 0.0;
    ErrorWindow window = ErrorWindow::Zero();
    for (long k = 0; k < rec.steps; ++k) {
        const StateRow& leader = rec.states[static_cast<std::size_t>(k) * 21u];
        const StateRow& me = rec.states[static_cast<std::size_t>(k) * 21u + 3u];
        const double e = me.x - leader.x;
        if (k == 0) {
            window = ErrorWindow::Constant(e);
        } else {
            window = ErrorWindow(e, window(0), window(1));
        }
        expect += utility(window, me.ut_x, Q, cfg.tracking.R);
    }
    CHECK(cumulative_cost(rec, 3, 0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(cumulative_cost(rec, 0, 0), ConfigError);
    CHECK_THROWS_AS(cumulative_cost(rec, 3, 2), ConfigError);
}
