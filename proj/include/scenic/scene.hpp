#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scenic/math.hpp"
#include "scenic/rng.hpp"
#include "scenic/track.hpp"

namespace scenic {

// Robot pose with the position normalized by the arena bounding box.
// Components of p_norm are clamped to [0, 1]; the quaternion is kept unit.
struct Pose {
    Vec3 p_norm;
    Quat q = Quat::identity();

    Pose() = default;

    Pose(const Vec3& p_norm_raw, const Quat& q_raw)
        : p_norm{clamp(p_norm_raw.x, 0.0, 1.0), clamp(p_norm_raw.y, 0.0, 1.0),
                 clamp(p_norm_raw.z, 0.0, 1.0)},
          q(q_raw.normalized()) {}

    // Constructor used during data generation: world positions outside the
    // arena are rejected instead of clamped.
    static Pose from_world(const Vec3& position, const Quat& attitude, const Aabb& arena) {
        if (!arena.contains(position))
            throw std::domain_error("Pose::from_world: position outside arena");
        const Vec3 ext = arena.extent();
        return Pose({(position.x - arena.lo.x) / ext.x, (position.y - arena.lo.y) / ext.y,
                     (position.z - arena.lo.z) / ext.z},
                    attitude);
    }

    Vec3 world_position(const Aabb& arena) const {
        const Vec3 ext = arena.extent();
        return {arena.lo.x + p_norm.x * ext.x, arena.lo.y + p_norm.y * ext.y,
                arena.lo.z + p_norm.z * ext.z};
    }
};

inline constexpr int kPoseFeatureDim = 16;
inline constexpr int kMixedChannels = 32;
inline constexpr int kDistractorChannels = 16;
inline constexpr int kObservationDim = kMixedChannels + kDistractorChannels;

// Scene-specific observation parameters: a linear mixing of the pose feature
// map, a channel offset, and nuisance distractor channels that depend on the
// scene and on the coarse pose region only.
struct Scene {
    int scene_id = 0;
    std::vector<double> mixing;  // kMixedChannels x kPoseFeatureDim, row-major
    std::vector<double> offset;  // kObservationDim
    std::uint64_t distractor_seed = 0;
    double noise_std = 0.0;

    // Distractor shaping, derived from distractor_seed at construction.
    std::vector<double> distractor_amp;
    std::vector<double> distractor_freq;
    std::vector<double> distractor_phase;
    std::vector<double> distractor_base;
};

namespace detail {

// Column rank of a row-major m x n matrix via Gaussian elimination.
inline int matrix_rank(std::vector<double> a, int m, int n, double tol = 1e-9) {
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pivot = -1;
        double best = tol;
        for (int r = rank; r < m; ++r) {
            if (std::fabs(a[r * n + col]) > best) {
                best = std::fabs(a[r * n + col]);
                pivot = r;
            }
        }
        if (pivot < 0) continue;
        for (int c = 0; c < n; ++c) std::swap(a[rank * n + c], a[pivot * n + c]);
        for (int r = 0; r < m; ++r) {
            if (r == rank) continue;
            const double f = a[r * n + col] / a[rank * n + col];
            for (int c = 0; c < n; ++c) a[r * n + c] -= f * a[rank * n + c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

inline Scene make_scene(int scene_id, std::uint64_t master_seed, double noise_std = 0.01) {
    Scene s;
    s.scene_id = scene_id;
    s.noise_std = noise_std;
    Rng rng = Rng(master_seed).split("scene", static_cast<std::uint64_t>(scene_id));

    s.mixing.resize(kMixedChannels * kPoseFeatureDim);
    for (auto& v : s.mixing) v = rng.normal(0.0, 0.25);
    if (detail::matrix_rank(s.mixing, kMixedChannels, kPoseFeatureDim) < kPoseFeatureDim)
        throw std::runtime_error("make_scene: mixing matrix is column-rank deficient");

    s.offset.resize(kObservationDim);
    for (auto& v : s.offset) v = rng.uniform(-0.5, 0.5);

    s.distractor_seed = rng.split("distractor").seed();
    Rng drng(s.distractor_seed);
    s.distractor_amp.resize(kDistractorChannels);
    s.distractor_freq.resize(kDistractorChannels);
    s.distractor_phase.resize(kDistractorChannels);
    s.distractor_base.resize(kDistractorChannels);
    for (int c = 0; c < kDistractorChannels; ++c) {
        s.distractor_amp[c] = drng.uniform(0.3, 1.0);
        s.distractor_freq[c] = static_cast<double>(1 + drng.index(3));
        s.distractor_phase[c] = drng.uniform(0.0, 2.0 * kPi);
        s.distractor_base[c] = drng.uniform(-0.5, 0.5);
    }
    return s;
}

// Where the robot is relative to the race path: the segment it is on, the
// gate it is about to cross, and its progress. Positions inside a gate
// opening resolve to that gate; elsewhere the figure-8 crossing is
// disambiguated by the camera heading.
struct TrackContext {
    std::size_t segment = 0;
    std::size_t next_gate = 0;
    double progress = 0.0;
    double lateral_offset = 0.0;   // signed horizontal offset from the segment, m
    double vertical_offset = 0.0;  // m
};

inline TrackContext resolve_track_context(const Track& track, const Vec3& position,
                                          const Vec3& heading) {
    TrackContext ctx;
    const std::size_t n = track.gate_count();

    std::size_t seg = n;
    for (std::size_t k = 0; k < n; ++k) {
        const Gate& g = track.gate(k);
        if ((position - g.center).norm() <= 0.5 * g.half_width) {
            seg = (k + n - 1) % n;  // in the opening of gate k: about to cross it
            break;
        }
    }
    if (seg == n) seg = track.nearest_segment(position, heading);

    ctx.segment = seg;
    ctx.next_gate = (seg + 1) % n;
    const Track::SegmentProjection proj = track.project_on_segment(seg, position);
    ctx.progress = proj.progress;

    const Vec3 dir = track.segment_direction(seg);
    const Vec3 closest = track.segment_start(seg) +
                         (track.segment_end(seg) - track.segment_start(seg)) * proj.t;
    const Vec3 off = position - closest;
    const Vec3 horiz_normal = Vec3{0.0, 0.0, 1.0}.cross(dir);
    const double hn = horiz_normal.norm();
    ctx.lateral_offset = hn > 1e-9 ? off.dot(horiz_normal / hn) : 0.0;
    ctx.vertical_offset = off.z;
    return ctx;
}

// Scene-independent pose feature map g(pose): gate-relative ranges and
// bearings, progress encoding, attitude, and path offsets. All features are
// scaled to O(1) ranges.
class ObservationModel {
public:
    explicit ObservationModel(const Track& track) : track_(&track) {}

    const Track& track() const { return *track_; }

    std::vector<double> pose_features(const Pose& pose) const {
        const Track& track = *track_;
        const Vec3 position = pose.world_position(track.arena());
        const Vec3 camera_axis = pose.q.body_x();
        const TrackContext ctx = resolve_track_context(track, position, camera_axis);

        const Gate& g1 = track.gate(ctx.next_gate);
        const Gate& g2 = track.gate(ctx.next_gate + 1);

        std::vector<double> f(kPoseFeatureDim, 0.0);
        const Vec3 to_g1 = g1.center - position;
        const Vec3 to_g2 = g2.center - position;
        const double d1 = to_g1.norm();
        const double d2 = to_g2.norm();
        const Vec3 bearing1 = d1 > 1e-9 ? pose.q.rotate_back(to_g1 / d1) : Vec3{1, 0, 0};
        const Vec3 bearing2 = d2 > 1e-9 ? pose.q.rotate_back(to_g2 / d2) : Vec3{1, 0, 0};

        f[0] = d1 / 10.0;
        f[1] = bearing1.x;
        f[2] = bearing1.y;
        f[3] = bearing1.z;
        f[4] = d2 / 10.0;
        f[5] = bearing2.x;
        f[6] = bearing2.y;
        f[7] = bearing2.z;
        f[8] = std::sin(2.0 * kPi * ctx.progress);
        f[9] = std::cos(2.0 * kPi * ctx.progress);
        const Vec3 bz = pose.q.body_z();
        f[10] = bz.x;
        f[11] = bz.y;
        f[12] = bz.z;
        // Camera alignment: towards the gate center from afar, morphing into
        // the gate normal inside the opening so the feature stays defined
        // through the crossing.
        Vec3 ref = g1.normal;
        if (d1 > 1e-9) {
            const double blend = clamp(d1 / g1.half_width, 0.0, 1.0);
            const Vec3 mix = (to_g1 / d1) * blend + g1.normal * (1.0 - blend);
            const double mn = mix.norm();
            if (mn > 1e-9) ref = mix / mn;
        }
        f[13] = std::acos(clamp(camera_axis.dot(ref), -1.0, 1.0)) / kPi;
        f[14] = ctx.lateral_offset / 2.0;
        f[15] = ctx.vertical_offset / 2.0;
        return f;
    }

    // obs = mixing * g(pose) + offset + distractor(scene, coarse region) + noise.
    // Deterministic given (scene, pose, rng state); noise_std = 0 gives a pure
    // function of (scene, pose).
    std::vector<double> render(const Scene& scene, const Pose& pose, Rng* rng = nullptr) const {
        const std::vector<double> g = pose_features(pose);
        std::vector<double> obs(kObservationDim, 0.0);
        for (int r = 0; r < kMixedChannels; ++r) {
            double acc = 0.0;
            const double* row = &scene.mixing[static_cast<std::size_t>(r) * kPoseFeatureDim];
            for (int c = 0; c < kPoseFeatureDim; ++c) acc += row[c] * g[c];
            obs[r] = acc + scene.offset[r];
        }
        const int octant = (pose.p_norm.x >= 0.5 ? 1 : 0) + (pose.p_norm.y >= 0.5 ? 2 : 0) +
                           (pose.p_norm.z >= 0.5 ? 4 : 0);
        for (int c = 0; c < kDistractorChannels; ++c) {
            obs[kMixedChannels + c] =
                scene.distractor_amp[c] *
                    std::cos(scene.distractor_freq[c] * octant + scene.distractor_phase[c]) +
                scene.distractor_base[c] + scene.offset[kMixedChannels + c];
        }
        if (rng != nullptr && scene.noise_std > 0.0)
            for (auto& v : obs) v += rng->normal(0.0, scene.noise_std);
        return obs;
    }

private:
    const Track* track_;
};

// Brightness/contrast style jitter: one gain and one bias per vector.
// strength = 0 is the identity; the jitter is symmetric around the input.
inline std::vector<double> augment(const std::vector<double>& obs, double strength, Rng& rng) {
    if (strength < 0.0 || strength >= 1.0)
        throw std::invalid_argument("augment: strength must be in [0, 1)");
    if (strength == 0.0) return obs;
    const double gain = rng.uniform(1.0 - strength, 1.0 + strength);
    const double bias = rng.uniform(-strength, strength);
    std::vector<double> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) out[i] = gain * obs[i] + bias;
    return out;
}

// Random pose in the tube the data-collection rollouts cover: a point on the
// path with lateral and vertical jitter, heading along the path with yaw and
// tilt jitter.
inline Pose sample_track_pose(const Track& track, Rng& rng) {
    const double progress = rng.uniform(0.0, 1.0);
    const Vec3 on_path = track.point_at(progress);
    double s = progress * track.total_length();
    std::size_t seg = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < track.gate_count(); ++i) {
        if (s <= acc + track.segment_length(i)) {
            seg = i;
            break;
        }
        acc += track.segment_length(i);
    }
    const Vec3 dir = track.segment_direction(seg);
    const Vec3 side = Vec3{0.0, 0.0, 1.0}.cross(dir).normalized();

    Vec3 position = on_path + side * rng.uniform(-1.0, 1.0) +
                    Vec3{0.0, 0.0, rng.uniform(-0.5, 0.5)};
    const Vec3 lo = track.arena().lo, hi = track.arena().hi;
    position = {clamp(position.x, lo.x + 0.1, hi.x - 0.1),
                clamp(position.y, lo.y + 0.1, hi.y - 0.1),
                clamp(position.z, lo.z + 0.1, hi.z - 0.1)};

    const double yaw = std::atan2(dir.y, dir.x) + rng.uniform(-0.2, 0.2);
    const Quat q = Quat::from_axis_angle({0.0, 0.0, 1.0}, yaw) *
                   Quat::from_axis_angle({0.0, 1.0, 0.0}, rng.uniform(-0.1, 0.1)) *
                   Quat::from_axis_angle({1.0, 0.0, 0.0}, rng.uniform(-0.1, 0.1));
    return Pose::from_world(position, q, track.arena());
}

}  // namespace scenic
