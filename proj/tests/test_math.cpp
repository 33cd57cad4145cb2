#include <catch2/catch_amalgamated.hpp>

#include "scenic/math.hpp"
#include "scenic/rng.hpp"

using namespace scenic;
using Catch::Approx;

TEST_CASE("Vec3 algebra") {
    const Vec3 a{1.0, -2.0, 3.0};
    const Vec3 b{4.0, 0.5, -1.0};
    REQUIRE((a + b).x == 5.0);
    REQUIRE((a - b).y == -2.5);
    REQUIRE((a * 2.0).z == 6.0);
    REQUIRE((2.0 * a).z == 6.0);
    REQUIRE(a.dot(b) == Approx(4.0 - 1.0 - 3.0));
    REQUIRE(a.cross(b).dot(a) == Approx(0.0).margin(1e-12));
    REQUIRE(a.cross(b).dot(b) == Approx(0.0).margin(1e-12));
    REQUIRE(a.squared_norm() == Approx(a.norm() * a.norm()));
    REQUIRE(a.normalized().norm() == Approx(1.0));
    REQUIRE_THROWS_AS(Vec3{}.normalized(), std::domain_error);
    REQUIRE(l1_dist(a, b) == Approx(3.0 + 2.5 + 4.0));
}

TEST_CASE("quaternion rotations") {
    const Quat q = Quat::from_axis_angle({0.0, 0.0, 1.0}, kPi / 2.0);
    const Vec3 r = q.rotate({1.0, 0.0, 0.0});
    REQUIRE(r.x == Approx(0.0).margin(1e-12));
    REQUIRE(r.y == Approx(1.0));
    REQUIRE(r.z == Approx(0.0).margin(1e-12));

    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        Quat u{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        u = u.normalized();
        const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        const Vec3 back = u.rotate_back(u.rotate(v));
        REQUIRE(back.x == Approx(v.x).margin(1e-12));
        REQUIRE(back.y == Approx(v.y).margin(1e-12));
        REQUIRE(back.z == Approx(v.z).margin(1e-12));
        REQUIRE(u.rotate(v).norm() == Approx(v.norm()).margin(1e-12));
    }

    const Quat ab = Quat::from_axis_angle({0.0, 0.0, 1.0}, 0.3) *
                    Quat::from_axis_angle({0.0, 0.0, 1.0}, 0.4);
    const Quat c = Quat::from_axis_angle({0.0, 0.0, 1.0}, 0.7);
    REQUIRE(ab.dot(c) == Approx(1.0));
    REQUIRE(Quat::from_axis_angle({0.0, 0.0, 0.0}, 1.0).w == 1.0);
}

TEST_CASE("quat_angle is a sign-invariant geodesic distance") {
    REQUIRE(quat_angle(Quat::identity(), Quat::identity()) == 0.0);
    const Quat q = Quat::from_axis_angle({0.0, 1.0, 0.0}, 0.8);
    REQUIRE(quat_angle(Quat::identity(), q) == Approx(0.8));
    const Quat neg{-q.w, -q.x, -q.y, -q.z};
    REQUIRE(quat_angle(Quat::identity(), neg) == quat_angle(Quat::identity(), q));

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Quat a{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        Quat b{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        a = a.normalized();
        b = b.normalized();
        const double ang = quat_angle(a, b);
        REQUIRE(ang >= 0.0);
        REQUIRE(ang <= kPi + 1e-12);
        REQUIRE(quat_angle(b, a) == ang);
        REQUIRE(quat_angle(a, Quat{-b.w, -b.x, -b.y, -b.z}) == ang);
    }
}

TEST_CASE("vector helpers") {
    const VecX a{1.0, 2.0, 3.0};
    const VecX b{0.5, -1.0, 2.0};
    REQUIRE(dot(a, b) == Approx(0.5 - 2.0 + 6.0));
    REQUIRE_THROWS_AS(dot(a, VecX{1.0}), std::invalid_argument);
    REQUIRE(l2_norm(a) == Approx(std::sqrt(14.0)));
    REQUIRE(clamp(5.0, 0.0, 1.0) == 1.0);
    REQUIRE(clamp(-5.0, 0.0, 1.0) == 0.0);
    REQUIRE(clamp(0.5, 0.0, 1.0) == 0.5);
    REQUIRE(all_finite(a));
    REQUIRE_FALSE(all_finite({1.0, std::nan(""), 2.0}));
}

TEST_CASE("cosine similarity") {
    const VecX a{1.0, 0.0};
    const VecX b{0.0, 2.0};
    REQUIRE(cosine_similarity(a, b) == Approx(0.0).margin(1e-15));
    REQUIRE(cosine_similarity(a, a) == Approx(1.0));
    REQUIRE(cosine_similarity(a, VecX{-3.0, 0.0}) == Approx(-1.0));
    REQUIRE(cosine_similarity(a, VecX{5.0, 0.0}) == Approx(1.0));
    REQUIRE_THROWS_AS(cosine_similarity(a, VecX{0.0, 0.0}), std::domain_error);

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        VecX u(8), v(8);
        for (auto& x : u) x = rng.normal();
        for (auto& x : v) x = rng.normal();
        const double s = cosine_similarity(u, v);
        REQUIRE(s >= -1.0);
        REQUIRE(s <= 1.0);
    }
}
