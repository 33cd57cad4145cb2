#pragma once

#include <cmath>
#include <stdexcept>

#include "scenic/dynamics.hpp"
#include "scenic/math.hpp"
#include "scenic/track.hpp"

namespace scenic {

struct TeacherObservation {
    SimState state;
    Vec3 rel_next_gate;  // gate center minus position, world frame
    int next_gate_index = 0;
};

inline TeacherObservation make_teacher_observation(const SimState& state, const Track& track,
                                                   int next_gate) {
    TeacherObservation o;
    o.state = state;
    o.next_gate_index = next_gate;
    o.rel_next_gate = track.gate(static_cast<std::size_t>(next_gate)).center - state.position;
    if (!o.rel_next_gate.finite())
        throw std::invalid_argument("make_teacher_observation: non-finite relative gate");
    return o;
}

struct TeacherGains {
    double lookahead = 1.8;
    double cruise_speed = 1.5;
    double kv = 1.2;
    double k_att = 2.5;
};

namespace detail {

inline Quat quat_from_columns(const Vec3& x, const Vec3& y, const Vec3& z) {
    const double m00 = x.x, m01 = y.x, m02 = z.x;
    const double m10 = x.y, m11 = y.y, m12 = z.y;
    const double m20 = x.z, m21 = y.z, m22 = z.z;
    const double tr = m00 + m11 + m22;
    Quat q;
    if (tr > 0.0) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (m21 - m12) / s;
        q.y = (m02 - m20) / s;
        q.z = (m10 - m01) / s;
    } else if (m00 > m11 && m00 > m22) {
        const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
        q.w = (m21 - m12) / s;
        q.x = 0.25 * s;
        q.y = (m01 + m10) / s;
        q.z = (m02 + m20) / s;
    } else if (m11 > m22) {
        const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
        q.w = (m02 - m20) / s;
        q.x = (m01 + m10) / s;
        q.y = 0.25 * s;
        q.z = (m12 + m21) / s;
    } else {
        const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
        q.w = (m10 - m01) / s;
        q.x = (m02 + m20) / s;
        q.y = (m12 + m21) / s;
        q.z = 0.25 * s;
    }
    return q.normalized();
}

// Rotation vector (axis * angle) of the quaternion, shortest arc.
inline Vec3 quat_rotation_vector(const Quat& q) {
    Quat u = q.normalized();
    if (u.w < 0.0) u = Quat{-u.w, -u.x, -u.y, -u.z};
    const double vnorm = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
    if (vnorm < 1e-12) return Vec3{0.0, 0.0, 0.0};
    const double angle = 2.0 * std::atan2(vnorm, u.w);
    return Vec3{u.x, u.y, u.z} * (angle / vnorm);
}

}  // namespace detail

// Carrot point a fixed arc length ahead of the vehicle's projection onto the
// gate polyline. Anchored to the segment ending at the next gate, so the
// figure-eight crossing never flips the reference.
inline Vec3 pursuit_point(const Track& track, const Vec3& position, int next_gate,
                          double lookahead) {
    const int n = static_cast<int>(track.gate_count());
    const int seg = ((next_gate - 1) % n + n) % n;
    const Track::SegmentProjection proj =
        track.project_on_segment(static_cast<std::size_t>(seg), position);
    double remaining = proj.t * track.segment_length(static_cast<std::size_t>(seg)) + lookahead;
    int s = seg;
    for (int hops = 0; hops <= n; ++hops) {
        const double len = track.segment_length(static_cast<std::size_t>(s));
        if (remaining <= len) {
            const Vec3 dir = track.segment_direction(static_cast<std::size_t>(s));
            return track.segment_start(static_cast<std::size_t>(s)) + dir * remaining;
        }
        remaining -= len;
        s = (s + 1) % n;
    }
    return track.gate(static_cast<std::size_t>(next_gate)).center;
}

// Geometric expert: pure pursuit of the gate polyline at cruise speed, thrust
// along the current body z, body rates from the shortest-arc attitude error
// toward (z aligned with desired acceleration, x facing the next gate).
inline Command teacher_command(const TeacherObservation& tobs, const Track& track,
                               const TeacherGains& gains, const QuadParams& params) {
    const SimState& st = tobs.state;
    if (!st.finite()) throw std::invalid_argument("teacher_command: non-finite state");

    const Vec3 carrot =
        pursuit_point(track, st.position, tobs.next_gate_index, gains.lookahead);
    Vec3 to_carrot = carrot - st.position;
    const double dist = to_carrot.norm();
    const int n = static_cast<int>(track.gate_count());
    const int seg = ((tobs.next_gate_index - 1) % n + n) % n;
    const Vec3 fallback_dir = track.segment_direction(static_cast<std::size_t>(seg));
    const Vec3 track_dir = dist > 1e-6 ? to_carrot / dist : fallback_dir;

    const Vec3 v_des = track_dir * gains.cruise_speed;
    const Vec3 a_des = (v_des - st.velocity) * gains.kv + Vec3{0.0, 0.0, kGravity};

    const Vec3 body_z = st.attitude.body_z();
    double thrust = a_des.dot(body_z) / params.max_thrust_accel;
    thrust = clamp(thrust, 0.0, 1.0);

    Vec3 z_des = a_des.norm() > 1e-6 ? a_des.normalized() : Vec3{0.0, 0.0, 1.0};
    const Vec3 to_gate = tobs.rel_next_gate;
    Vec3 x_raw = to_gate - z_des * to_gate.dot(z_des);
    if (x_raw.norm() < 1e-6) {
        x_raw = track_dir - z_des * track_dir.dot(z_des);
        if (x_raw.norm() < 1e-6) x_raw = st.attitude.body_x();
    }
    const Vec3 x_des = x_raw.normalized();
    const Vec3 y_des = z_des.cross(x_des).normalized();
    const Quat q_des = detail::quat_from_columns(x_des, y_des, z_des);

    const Quat q_err = st.attitude.conjugate() * q_des;
    const Vec3 rot_vec = detail::quat_rotation_vector(q_err);
    Vec3 rates = rot_vec * gains.k_att;
    rates.x = clamp(rates.x, -params.body_rate_limit, params.body_rate_limit);
    rates.y = clamp(rates.y, -params.body_rate_limit, params.body_rate_limit);
    rates.z = clamp(rates.z, -params.body_rate_limit, params.body_rate_limit);

    return Command{thrust, rates};
}

inline Command teacher_command(const SimState& state, const Track& track, int next_gate,
                               const TeacherGains& gains, const QuadParams& params) {
    return teacher_command(make_teacher_observation(state, track, next_gate), track, gains,
                           params);
}

}  // namespace scenic
