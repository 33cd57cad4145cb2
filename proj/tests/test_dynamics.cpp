#include <catch2/catch_amalgamated.hpp>

#include "scenic/dynamics.hpp"
#include "scenic/track.hpp"

#include <cmath>

using namespace scenic;
using Catch::Approx;

TEST_CASE("hover command holds altitude") {
    const QuadParams params;
    SimState s;
    s.position = {0.0, 0.0, 2.0};
    const Command hover{params.hover_thrust(), {0.0, 0.0, 0.0}};
    for (int i = 0; i < 180; ++i) s = step_dynamics(s, hover, params.dt, params);
    REQUIRE(s.position.z == Approx(2.0).margin(1e-9));
    REQUIRE(s.velocity.norm() == Approx(0.0).margin(1e-9));
    REQUIRE(s.attitude.dot(Quat::identity()) == Approx(1.0));
}

TEST_CASE("zero thrust free-falls") {
    const QuadParams params;
    SimState s;
    s.position = {0.0, 0.0, 4.0};
    const Command cmd{0.0, {0.0, 0.0, 0.0}};
    const int n = 90;
    for (int i = 0; i < n; ++i) s = step_dynamics(s, cmd, params.dt, params);
    REQUIRE(s.velocity.z == Approx(-kGravity * n * params.dt));
    REQUIRE(s.position.z < 4.0);
}

TEST_CASE("body rates follow a first-order lag") {
    const QuadParams params;
    SimState s;
    s.body_rates = {0.5, -0.2, 0.1};
    const Command cmd{params.hover_thrust(), {1.0, 0.0, -1.0}};
    const SimState next = step_dynamics(s, cmd, params.dt, params);
    const double decay = std::exp(-params.dt / params.rate_time_constant);
    REQUIRE(next.body_rates.x == Approx(1.0 + (0.5 - 1.0) * decay));
    REQUIRE(next.body_rates.y == Approx(-0.2 * decay));
    REQUIRE(next.body_rates.z == Approx(-1.0 + (0.1 + 1.0) * decay));
}

TEST_CASE("attitude stays unit under spin") {
    const QuadParams params;
    SimState s;
    const Command cmd{params.hover_thrust(), {2.0, 1.5, -2.5}};
    for (int i = 0; i < 300; ++i) {
        s = step_dynamics(s, cmd, params.dt, params);
        REQUIRE(s.attitude.norm() == Approx(1.0).margin(1e-12));
        REQUIRE(s.finite());
    }
}

TEST_CASE("step validation") {
    const QuadParams params;
    SimState s;
    const Command ok{0.5, {0.0, 0.0, 0.0}};
    REQUIRE_THROWS_AS(step_dynamics(s, ok, 0.0, params), std::invalid_argument);
    REQUIRE_THROWS_AS(step_dynamics(s, ok, -0.01, params), std::invalid_argument);
    REQUIRE_THROWS_AS(step_dynamics(s, ok, 0.05, params), std::invalid_argument);
    const Command bad{std::nan(""), {0.0, 0.0, 0.0}};
    REQUIRE_THROWS_AS(step_dynamics(s, bad, params.dt, params), std::invalid_argument);
}

TEST_CASE("clamp_command saturates") {
    const QuadParams params;
    const Command raw{1.7, {5.0, -9.0, 0.5}};
    const Command c = clamp_command(raw, params);
    REQUIRE(c.thrust == 1.0);
    REQUIRE(c.body_rate_cmd.x == params.body_rate_limit);
    REQUIRE(c.body_rate_cmd.y == -params.body_rate_limit);
    REQUIRE(c.body_rate_cmd.z == 0.5);
    const Command low = clamp_command({-0.2, {0, 0, 0}}, params);
    REQUIRE(low.thrust == 0.0);
}

TEST_CASE("gate crossing detection") {
    const Gate gate{{0.0, 0.0, 2.0}, {1.0, 0.0, 0.0}, 1.0};
    const GateCrossing pass =
        check_gate_crossing({-0.1, 0.2, 2.1}, {0.1, 0.2, 2.1}, gate);
    REQUIRE(pass.passed);
    REQUIRE_FALSE(pass.hit_frame);

    const GateCrossing frame =
        check_gate_crossing({-0.1, 1.5, 2.0}, {0.1, 1.5, 2.0}, gate);
    REQUIRE_FALSE(frame.passed);
    REQUIRE(frame.hit_frame);

    const GateCrossing wide =
        check_gate_crossing({-0.1, 8.0, 2.0}, {0.1, 8.0, 2.0}, gate);
    REQUIRE_FALSE(wide.passed);
    REQUIRE_FALSE(wide.hit_frame);

    const GateCrossing backwards =
        check_gate_crossing({0.1, 0.0, 2.0}, {-0.1, 0.0, 2.0}, gate);
    REQUIRE_FALSE(backwards.passed);
    REQUIRE_FALSE(backwards.hit_frame);

    REQUIRE_FALSE(check_gate_crossing({-0.3, 0.0, 2.0}, {-0.1, 0.0, 2.0}, gate).passed);
}

TEST_CASE("collision checks") {
    const Track track = make_figure8_track();
    REQUIRE(check_collision({0.0, 0.0, 0.1}, {0.0, 0.0, -0.01}, track, 0));
    REQUIRE(check_collision({9.0, 0.0, 2.0}, {11.0, 0.0, 2.0}, track, 0));

    const Gate& g = track.gate(1);
    const Vec3 off = g.normal.cross({0.0, 0.0, 1.0}).normalized() * 1.5;
    const Vec3 prev = g.center + off - g.normal * 0.1;
    const Vec3 cur = g.center + off + g.normal * 0.1;
    REQUIRE(check_collision(prev, cur, track, 1));
    REQUIRE_FALSE(check_collision(prev, cur, track, 2));
    REQUIRE_FALSE(check_collision({0.0, 0.0, 2.0}, {0.1, 0.0, 2.0}, track, 0));
}

TEST_CASE("reward terms decompose") {
    const Track track = make_figure8_track();
    const RewardWeights w;
    SimState prev, cur;
    prev.position = track.point_at(0.01);
    cur.position = track.point_at(0.02);
    prev.velocity = cur.velocity = {1.0, 0.0, 0.0};
    const Command c0{0.5, {0.0, 0.0, 0.0}};
    const Command c1{0.6, {0.5, 0.0, 0.0}};
    const RewardTerms r = reward_terms(prev, cur, c0, c1, track, 1, w);
    REQUIRE(r.prog > 0.0);
    REQUIRE(r.act >= 0.0);
    REQUIRE(r.br >= 0.0);
    REQUIRE(r.total == Approx(r.prog + r.perc - r.act - r.br + r.pass - r.crash));
    REQUIRE_FALSE(r.passed_gate);
    REQUIRE_FALSE(r.crashed);

    const RewardTerms back = reward_terms(cur, prev, c0, c0, track, 1, w);
    REQUIRE(back.prog < 0.0);
}

TEST_CASE("camera angle vanishes when facing the gate") {
    const Vec3 center{3.0, 0.0, 2.0};
    SimState s;
    s.position = {1.0, 0.0, 2.0};
    s.attitude = Quat::identity();
    REQUIRE(camera_gate_angle(s, center) == Approx(0.0).margin(1e-12));
    s.attitude = Quat::from_axis_angle({0.0, 0.0, 1.0}, kPi / 2.0);
    REQUIRE(camera_gate_angle(s, center) == Approx(kPi / 2.0));
    s.position = center;
    REQUIRE(camera_gate_angle(s, center) == 0.0);
}
