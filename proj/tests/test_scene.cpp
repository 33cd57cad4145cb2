#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "scenic/scene.hpp"
#include "scenic/track.hpp"

using namespace scenic;
using Catch::Approx;

TEST_CASE("pose normalization") {
    const Pose p({1.4, -0.2, 0.5}, Quat{2.0, 0.0, 0.0, 0.0});
    REQUIRE(p.p_norm.x == 1.0);
    REQUIRE(p.p_norm.y == 0.0);
    REQUIRE(p.p_norm.z == 0.5);
    REQUIRE(p.q.norm() == Approx(1.0));

    const Aabb arena{{-10.0, -10.0, 0.0}, {10.0, 10.0, 5.0}};
    const Vec3 world{2.0, -4.0, 1.0};
    const Pose q = Pose::from_world(world, Quat::identity(), arena);
    const Vec3 back = q.world_position(arena);
    REQUIRE(back.x == Approx(world.x));
    REQUIRE(back.y == Approx(world.y));
    REQUIRE(back.z == Approx(world.z));
    REQUIRE_THROWS_AS(Pose::from_world({11.0, 0.0, 1.0}, Quat::identity(), arena),
                      std::domain_error);
}

TEST_CASE("scene construction is deterministic per id") {
    const Scene a = make_scene(2, 777);
    const Scene b = make_scene(2, 777);
    REQUIRE(a.mixing == b.mixing);
    REQUIRE(a.offset == b.offset);
    REQUIRE(a.distractor_seed == b.distractor_seed);

    const Scene c = make_scene(3, 777);
    REQUIRE(a.mixing != c.mixing);
    const Scene d = make_scene(2, 778);
    REQUIRE(a.mixing != d.mixing);
    REQUIRE(a.mixing.size() ==
            static_cast<std::size_t>(kMixedChannels) * kPoseFeatureDim);
    REQUIRE(a.offset.size() == static_cast<std::size_t>(kObservationDim));
}

TEST_CASE("render is a pure function of scene and pose") {
    const Track track = make_figure8_track();
    const ObservationModel model(track);
    Scene scene = make_scene(0, 777);
    scene.noise_std = 0.0;

    Rng rng(8);
    const Pose pose = sample_track_pose(track, rng);
    const auto f = model.pose_features(pose);
    REQUIRE(f.size() == static_cast<std::size_t>(kPoseFeatureDim));
    const auto obs1 = model.render(scene, pose);
    const auto obs2 = model.render(scene, pose);
    REQUIRE(obs1.size() == static_cast<std::size_t>(kObservationDim));
    REQUIRE(obs1 == obs2);
    REQUIRE(all_finite(obs1));

    Scene noisy = make_scene(0, 777, 0.05);
    Rng n1(5);
    const auto with_noise = model.render(noisy, pose, &n1);
    REQUIRE(with_noise != obs1);
    Rng n2(5);
    REQUIRE(model.render(noisy, pose, &n2) == with_noise);
}

TEST_CASE("distractor channels depend on the octant only") {
    const Track track = make_figure8_track();
    const ObservationModel model(track);
    Scene scene = make_scene(1, 777);
    scene.noise_std = 0.0;

    const Pose a({0.1, 0.2, 0.3}, Quat::identity());
    const Pose b({0.4, 0.3, 0.1}, Quat::from_axis_angle({0, 0, 1}, 0.7));
    const Pose c({0.6, 0.2, 0.3}, Quat::identity());
    const auto oa = model.render(scene, a);
    const auto ob = model.render(scene, b);
    const auto oc = model.render(scene, c);
    for (int k = kMixedChannels; k < kObservationDim; ++k) {
        REQUIRE(oa[k] == ob[k]);
    }
    bool distractor_moved = false;
    for (int k = kMixedChannels; k < kObservationDim; ++k)
        distractor_moved = distractor_moved || oa[k] != oc[k];
    REQUIRE(distractor_moved);
    REQUIRE(oa != ob);
}

TEST_CASE("augment applies one shared affine jitter") {
    Rng rng(13);
    const std::vector<double> obs = test::random_obs(rng);
    REQUIRE(augment(obs, 0.0, rng) == obs);
    REQUIRE_THROWS_AS(augment(obs, 1.0, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(augment(obs, -0.1, rng), std::invalid_argument);

    const auto out = augment(obs, 0.3, rng);
    REQUIRE(out.size() == obs.size());
    const double denom = obs[0] - obs[1];
    REQUIRE(std::fabs(denom) > 1e-9);
    const double gain = (out[0] - out[1]) / denom;
    const double bias = out[0] - gain * obs[0];
    REQUIRE(gain >= 0.7);
    REQUIRE(gain <= 1.3);
    REQUIRE(std::fabs(bias) <= 0.3);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        REQUIRE(out[i] == Approx(gain * obs[i] + bias).margin(1e-9));
    }
}

TEST_CASE("sampled track poses stay in the arena") {
    const Track track = make_figure8_track();
    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        const Pose p = sample_track_pose(track, rng);
        const Vec3 w = p.world_position(track.arena());
        REQUIRE(track.arena().contains(w));
        REQUIRE(p.q.norm() == Approx(1.0));
        REQUIRE(w.z > 0.0);
    }
}
