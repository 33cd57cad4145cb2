#include <catch2/catch_amalgamated.hpp>

#include "scenic/rng.hpp"
#include "scenic/teacher.hpp"

#include <cmath>

using namespace scenic;
using Catch::Approx;

namespace {

Track square_track() {
    const Aabb arena{{-10.0, -10.0, 0.0}, {10.0, 10.0, 5.0}};
    std::vector<Gate> gates = {{{0.0, 0.0, 2.0}, {1.0, 0.0, 0.0}, 1.0},
                               {{4.0, 0.0, 2.0}, {0.0, 1.0, 0.0}, 1.0},
                               {{4.0, 4.0, 2.0}, {-1.0, 0.0, 0.0}, 1.0},
                               {{0.0, 4.0, 2.0}, {0.0, -1.0, 0.0}, 1.0}};
    return Track(gates, arena);
}

}  // namespace

TEST_CASE("pursuit point leads along the active segment") {
    const Track track = square_track();
    const Vec3 carrot = pursuit_point(track, {0.0, 0.0, 2.0}, 1, 1.5);
    REQUIRE(carrot.x == Approx(1.5));
    REQUIRE(carrot.y == Approx(0.0).margin(1e-12));
    REQUIRE(carrot.z == Approx(2.0));

    // Near the segment end the carrot wraps onto the next segment.
    const Vec3 wrap = pursuit_point(track, {3.5, 0.0, 2.0}, 1, 1.5);
    REQUIRE(wrap.x == Approx(4.0));
    REQUIRE(wrap.y == Approx(1.0));
    REQUIRE(wrap.z == Approx(2.0));

    // Lateral offset projects back onto the polyline.
    const Vec3 side = pursuit_point(track, {2.0, 0.8, 2.0}, 1, 1.0);
    REQUIRE(side.x == Approx(3.0));
    REQUIRE(side.y == Approx(0.0).margin(1e-12));
}

TEST_CASE("teacher observation fields") {
    const Track track = square_track();
    SimState s;
    s.position = {1.0, 0.0, 2.0};
    const TeacherObservation o = make_teacher_observation(s, track, 1);
    REQUIRE(o.next_gate_index == 1);
    REQUIRE(o.rel_next_gate.x == Approx(3.0));
    REQUIRE(o.rel_next_gate.y == Approx(0.0).margin(1e-12));
    REQUIRE(o.rel_next_gate.z == Approx(0.0).margin(1e-12));
}

TEST_CASE("teacher holds hover thrust at rest on the path") {
    const Track track = square_track();
    const TeacherGains gains{1.5, 0.0, 2.5, 8.0};
    const QuadParams params;
    SimState s;
    s.position = {2.0, 0.0, 2.0};
    const Command cmd = teacher_command(s, track, 1, gains, params);
    REQUIRE(cmd.thrust == Approx(params.hover_thrust()).margin(1e-9));
    REQUIRE(cmd.body_rate_cmd.x == Approx(0.0).margin(1e-9));
    REQUIRE(cmd.body_rate_cmd.y == Approx(0.0).margin(1e-9));
    REQUIRE(cmd.body_rate_cmd.z == Approx(0.0).margin(1e-9));
}

TEST_CASE("teacher yaws toward an off-axis gate") {
    const Track track = square_track();
    const TeacherGains gains;
    const QuadParams params;
    SimState s;
    s.position = {4.0, 1.0, 2.0};
    s.velocity = {0.0, gains.cruise_speed, 0.0};
    const Command cmd = teacher_command(s, track, 2, gains, params);
    REQUIRE(cmd.body_rate_cmd.z > 0.1);
}

TEST_CASE("teacher commands stay within actuator bounds") {
    const Track track = square_track();
    const TeacherGains gains;
    const QuadParams params;
    Rng rng(61);
    for (int i = 0; i < 300; ++i) {
        SimState s;
        s.position = {rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0), rng.uniform(0.5, 4.5)};
        s.velocity = {rng.normal(0.0, 2.0), rng.normal(0.0, 2.0), rng.normal(0.0, 1.0)};
        Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        s.attitude = q.normalized();
        s.body_rates = {rng.normal(), rng.normal(), rng.normal()};
        const int gate = static_cast<int>(rng.index(track.gate_count()));
        const Command cmd = teacher_command(s, track, gate, gains, params);
        REQUIRE(cmd.finite());
        REQUIRE(cmd.thrust >= 0.0);
        REQUIRE(cmd.thrust <= 1.0);
        REQUIRE(std::fabs(cmd.body_rate_cmd.x) <= params.body_rate_limit);
        REQUIRE(std::fabs(cmd.body_rate_cmd.y) <= params.body_rate_limit);
        REQUIRE(std::fabs(cmd.body_rate_cmd.z) <= params.body_rate_limit);
    }
}

TEST_CASE("teacher rejects non-finite state") {
    const Track track = square_track();
    SimState s;
    s.position = {std::nan(""), 0.0, 2.0};
    REQUIRE_THROWS_AS(teacher_command(s, track, 1, TeacherGains{}, QuadParams{}),
                      std::invalid_argument);
}
