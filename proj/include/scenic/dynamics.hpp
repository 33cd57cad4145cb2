#pragma once

#include <cmath>
#include <stdexcept>

#include "scenic/math.hpp"
#include "scenic/track.hpp"

namespace scenic {

struct SimState {
    Vec3 position;
    Vec3 velocity;
    Quat attitude = Quat::identity();
    Vec3 body_rates;  // rad/s, body frame

    bool finite() const {
        return position.finite() && velocity.finite() && attitude.finite() &&
               body_rates.finite();
    }
};

// Collective thrust is normalized to [0, 1]; body-rate commands are clamped
// component-wise to the configured limit before use.
struct Command {
    double thrust = 0.0;
    Vec3 body_rate_cmd;

    bool finite() const { return std::isfinite(thrust) && body_rate_cmd.finite(); }
};

struct QuadParams {
    double max_thrust_accel = 2.0 * kGravity;  // m/s^2 at thrust = 1
    double rate_time_constant = 0.05;          // s, first-order body-rate lag
    double body_rate_limit = 3.0;              // rad/s, per axis
    double dt = 1.0 / 180.0;                   // s, simulation step

    double hover_thrust() const { return kGravity / max_thrust_accel; }
};

inline Command clamp_command(const Command& cmd, const QuadParams& params) {
    Command out;
    out.thrust = clamp(cmd.thrust, 0.0, 1.0);
    const double lim = params.body_rate_limit;
    out.body_rate_cmd = {clamp(cmd.body_rate_cmd.x, -lim, lim),
                         clamp(cmd.body_rate_cmd.y, -lim, lim),
                         clamp(cmd.body_rate_cmd.z, -lim, lim)};
    return out;
}

// Semi-implicit Euler step of the toy rigid-body model. Body rates follow the
// command through a first-order lag (exact discretization), the attitude is
// integrated with the quaternion exponential and renormalized, and the only
// forces are collective thrust along body z plus gravity.
inline SimState step_dynamics(const SimState& state, const Command& cmd_in, double dt,
                              const QuadParams& params) {
    if (dt <= 0.0 || dt > 0.02) throw std::invalid_argument("step_dynamics: dt out of range");
    if (!cmd_in.finite()) throw std::invalid_argument("step_dynamics: non-finite command");

    const Command cmd = clamp_command(cmd_in, params);
    SimState next = state;

    const double decay = std::exp(-dt / params.rate_time_constant);
    next.body_rates = cmd.body_rate_cmd + (state.body_rates - cmd.body_rate_cmd) * decay;

    const Vec3 dtheta = next.body_rates * dt;
    next.attitude = (state.attitude * Quat::from_axis_angle(dtheta, dtheta.norm())).normalized();

    const Vec3 thrust_accel = next.attitude.body_z() * (cmd.thrust * params.max_thrust_accel);
    const Vec3 accel = thrust_accel + Vec3{0.0, 0.0, -kGravity};

    next.velocity = state.velocity + accel * dt;
    next.position = state.position + next.velocity * dt;
    return next;
}

struct RewardWeights {
    double lambda1 = 1.0;     // progress
    double lambda2 = 0.02;    // perception
    double lambda3 = -10.0;   // perception exponent
    double lambda4 = 2e-4;    // action change
    double lambda5 = 0.0;     // unused
    double lambda6 = 1e-4;    // body rates
    double pass_reward = 10.0;
    double crash_penalty = 5.0;
};

struct RewardTerms {
    double prog = 0.0;
    double perc = 0.0;
    double act = 0.0;
    double br = 0.0;
    double pass = 0.0;
    double crash = 0.0;
    double total = 0.0;
    bool passed_gate = false;
    bool crashed = false;
};

// Angle between the camera optical axis (body x by convention) and the
// direction to the next gate center.
inline double camera_gate_angle(const SimState& state, const Vec3& gate_center) {
    const Vec3 to_gate = gate_center - state.position;
    const double n = to_gate.norm();
    if (n < 1e-9) return 0.0;
    const double c = clamp(state.attitude.body_x().dot(to_gate / n), -1.0, 1.0);
    return std::acos(c);
}

// A pass requires the prev->cur segment to cross the gate plane in the travel
// direction with the crossing point inside the opening. Crossing the plane in
// the frame band around the opening counts as hitting the gate frame.
struct GateCrossing {
    bool passed = false;
    bool hit_frame = false;
};

inline GateCrossing check_gate_crossing(const Vec3& prev_pos, const Vec3& cur_pos,
                                        const Gate& gate, double frame_band_factor = 2.0) {
    GateCrossing out;
    const double d_prev = (prev_pos - gate.center).dot(gate.normal);
    const double d_cur = (cur_pos - gate.center).dot(gate.normal);
    if (!(d_prev < 0.0 && d_cur >= 0.0)) return out;
    const double t = d_prev / (d_prev - d_cur);
    const Vec3 crossing = prev_pos + (cur_pos - prev_pos) * t;
    const double in_plane = ((crossing - gate.center) -
                             gate.normal * (crossing - gate.center).dot(gate.normal))
                                .norm();
    if (in_plane <= gate.half_width)
        out.passed = true;
    else if (in_plane <= frame_band_factor * gate.half_width)
        out.hit_frame = true;
    return out;
}

inline bool check_collision(const Vec3& prev_pos, const Vec3& cur_pos, const Track& track,
                            std::size_t next_gate) {
    if (cur_pos.z <= 0.0) return true;
    if (!track.arena().contains(cur_pos)) return true;
    return check_gate_crossing(prev_pos, cur_pos, track.gate(next_gate)).hit_frame;
}

// Reward of one simulation step, following the progress / perception /
// action / body-rate decomposition with binary pass and crash terms. The
// crash term enters the total as a net -crash_penalty.
inline RewardTerms reward_terms(const SimState& prev, const SimState& cur,
                                const Command& prev_cmd, const Command& cmd,
                                const Track& track, std::size_t next_gate,
                                const RewardWeights& w) {
    if (next_gate >= track.gate_count())
        throw std::invalid_argument("reward_terms: gate index out of range");
    const Gate& gate = track.gate(next_gate);

    RewardTerms r;
    const double d_prev = (prev.position - gate.center).norm();
    const double d_cur = (cur.position - gate.center).norm();
    r.prog = w.lambda1 * (d_prev - d_cur);

    const double delta_cam = camera_gate_angle(cur, gate.center);
    r.perc = w.lambda2 * std::exp(w.lambda3 * std::pow(delta_cam, 4.0));

    const Vec3 dr = cmd.body_rate_cmd - prev_cmd.body_rate_cmd;
    const double dthrust = cmd.thrust - prev_cmd.thrust;
    r.act = w.lambda4 * std::sqrt(dthrust * dthrust + dr.squared_norm());

    r.br = w.lambda6 * cur.body_rates.norm();

    const GateCrossing crossing = check_gate_crossing(prev.position, cur.position, gate);
    r.passed_gate = crossing.passed;
    if (crossing.passed) r.pass = w.pass_reward;

    r.crashed = check_collision(prev.position, cur.position, track, next_gate);
    if (r.crashed) r.crash = w.crash_penalty;

    r.total = r.prog + r.perc - r.act - r.br + r.pass - r.crash;
    return r;
}

}  // namespace scenic
