#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/dataset.hpp"
#include "scenic/dynamics.hpp"
#include "scenic/rng.hpp"
#include "scenic/scene.hpp"
#include "scenic/teacher.hpp"
#include "scenic/track.hpp"

namespace scenic {

constexpr int kControlDecimation = 6;  // 180 Hz dynamics, 30 Hz commands

enum class PolicyMode { Teacher, Student, Mixed };

struct ControlTickInput {
    int tick = 0;
    std::vector<double> obs;
    std::vector<std::array<double, 6>> imu_block;  // dynamics-rate samples since last tick
};

using Policy = std::function<Command(const ControlTickInput&)>;

struct ImuNoise {
    double gyro_std = 0.01;
    double accel_std = 0.05;
};

struct RolloutConfig {
    PolicyMode mode = PolicyMode::Teacher;
    int laps = 2;
    int max_steps = 0;  // 0 derives a budget from track length and cruise speed
    double beta = 0.0;  // Mixed: probability the teacher's command is executed
    double cmd_jitter = 0.0;      // stationary std of the execution disturbance
    double cmd_jitter_rho = 0.9;  // per-tick autocorrelation; slow drift, not white noise
    bool imu_noise = true;
    bool obs_noise = true;
    std::uint64_t seed = 0;
};

struct StepRecord {
    int t = 0;
    SimState state;
    int obs_index = -1;
    std::array<double, 6> imu{};
    Command teacher_cmd;
    Command exec_cmd;
    RewardTerms rewards;
    int gate_index = 0;
    double progress = 0.0;
};

struct ObsRecord {
    int tick = 0;
    int step = 0;
    ObservationSample sample;
};

struct RolloutResult {
    std::vector<StepRecord> steps;
    std::vector<ObsRecord> observations;
    int gates_passed = 0;
    int gates_required = 0;
    bool crashed = false;
    bool finished = false;
    double total_reward = 0.0;
};

inline SimState sample_start_state(const Track& track, Rng& rng) {
    const std::size_t n = track.gate_count();
    const Vec3 approach = track.segment_direction(n - 1);
    const Vec3 center = track.gate(0).center - approach * 2.0;
    SimState st;
    for (int attempt = 0; attempt < 64; ++attempt) {
        st.position = Vec3{center.x + rng.uniform(-0.5, 0.5), center.y + rng.uniform(-0.5, 0.5),
                           center.z + rng.uniform(-0.5, 0.5)};
        if (st.position.z > 0.3 && track.arena().contains(st.position)) break;
        st.position = center;
    }
    const Vec3 to_gate = track.gate(0).center - st.position;
    const double yaw = std::atan2(to_gate.y, to_gate.x);
    st.attitude = Quat::from_axis_angle(Vec3{0.0, 0.0, 1.0}, yaw);
    st.velocity = Vec3{0.0, 0.0, 0.0};
    st.body_rates = Vec3{0.0, 0.0, 0.0};
    return st;
}

namespace detail {

inline double polyline_progress(const Track& track, const Vec3& position, int next_gate) {
    const int n = static_cast<int>(track.gate_count());
    const int seg = ((next_gate - 1) % n + n) % n;
    const Track::SegmentProjection proj =
        track.project_on_segment(static_cast<std::size_t>(seg), position);
    double arc = proj.t * track.segment_length(static_cast<std::size_t>(seg));
    for (int s = 0; s < seg; ++s) arc += track.segment_length(static_cast<std::size_t>(s));
    double p = arc / track.total_length();
    p -= std::floor(p);
    return p;
}

inline std::array<double, 6> measure_imu(const SimState& state, double thrust,
                                         const QuadParams& params, const ImuNoise& noise,
                                         Rng* rng) {
    std::array<double, 6> imu{};
    imu[0] = state.body_rates.x;
    imu[1] = state.body_rates.y;
    imu[2] = state.body_rates.z;
    imu[5] = thrust * params.max_thrust_accel;  // specific force is thrust only, body frame
    if (rng) {
        for (int i = 0; i < 3; ++i) imu[static_cast<std::size_t>(i)] += rng->normal(0.0, noise.gyro_std);
        for (int i = 3; i < 6; ++i) imu[static_cast<std::size_t>(i)] += rng->normal(0.0, noise.accel_std);
    }
    return imu;
}

}  // namespace detail

inline int default_step_budget(const Track& track, int laps, const TeacherGains& gains,
                               const QuadParams& params) {
    const double cruise_time = laps * track.total_length() / gains.cruise_speed;
    return static_cast<int>(std::ceil((cruise_time * 1.8 + 4.0) / params.dt));
}

// Simulates one episode. The teacher always produces a label at each control
// tick; what gets executed depends on the mode. IMU samples are recorded at
// the dynamics rate, observations at the control rate.
inline RolloutResult run_rollout(const Track& track, const Scene& scene,
                                 const QuadParams& params, const TeacherGains& gains,
                                 const RewardWeights& weights, const RolloutConfig& cfg,
                                 const Policy& student = {}) {
    if (cfg.mode != PolicyMode::Teacher && !student)
        throw std::invalid_argument("run_rollout: mode requires a student policy");
    if (cfg.laps < 1) throw std::invalid_argument("run_rollout: laps must be >= 1");
    if (cfg.beta < 0.0 || cfg.beta > 1.0)
        throw std::invalid_argument("run_rollout: beta out of [0, 1]");

    const Rng base(cfg.seed);
    Rng start_rng = base.split("start");
    Rng jitter_rng = base.split("jitter");
    Rng imu_rng = base.split("imu");
    Rng obs_rng = base.split("obs");
    Rng beta_rng = base.split("beta");

    const int n_gates = static_cast<int>(track.gate_count());
    const int max_steps = cfg.max_steps > 0 ? cfg.max_steps
                                            : default_step_budget(track, cfg.laps, gains, params);
    const ImuNoise imu_noise;
    const ObservationModel obs_model(track);

    RolloutResult result;
    result.gates_required = cfg.laps * n_gates;
    result.steps.reserve(static_cast<std::size_t>(max_steps));

    SimState state = sample_start_state(track, start_rng);
    int next_gate = 0;
    Command exec_cmd{params.hover_thrust(), Vec3{0.0, 0.0, 0.0}};
    Command prev_cmd = exec_cmd;
    Command teacher_cmd = exec_cmd;
    ControlTickInput tick_input;

    const double rho = clamp(cfg.cmd_jitter_rho, 0.0, 1.0);
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    double jit_thrust = 0.0;
    Vec3 jit_rates{0.0, 0.0, 0.0};

    for (int t = 0; t < max_steps; ++t) {
        if (t % kControlDecimation == 0) {
            const int tick = t / kControlDecimation;
            const Pose pose = Pose::from_world(state.position, state.attitude, track.arena());
            const std::vector<double> obs =
                obs_model.render(scene, pose, cfg.obs_noise ? &obs_rng : nullptr);
            teacher_cmd = teacher_command(state, track, next_gate, gains, params);

            // The student is fed every tick so its history stays complete;
            // the mode only decides whose command is executed.
            Command cmd = teacher_cmd;
            if (cfg.mode != PolicyMode::Teacher) {
                tick_input.tick = tick;
                tick_input.obs = obs;
                const Command student_cmd = student(tick_input);
                if (cfg.mode == PolicyMode::Student ||
                    (cfg.mode == PolicyMode::Mixed && !beta_rng.bernoulli(cfg.beta)))
                    cmd = student_cmd;
            }
            // Execution jitter perturbs what is flown, never the recorded
            // label, so collected data pairs disturbed states with clean
            // corrective commands. Pure student mode stays unperturbed.
            if (cfg.cmd_jitter > 0.0 && cfg.mode != PolicyMode::Student) {
                cmd.thrust += jitter_rng.normal(0.0, cfg.cmd_jitter);
                cmd.body_rate_cmd.x += jitter_rng.normal(0.0, cfg.cmd_jitter * 2.0);
                cmd.body_rate_cmd.y += jitter_rng.normal(0.0, cfg.cmd_jitter * 2.0);
                cmd.body_rate_cmd.z += jitter_rng.normal(0.0, cfg.cmd_jitter * 2.0);
            }
            exec_cmd = clamp_command(cmd, params);
            tick_input.imu_block.clear();

            ObsRecord rec;
            rec.tick = tick;
            rec.step = t;
            rec.sample.scene_id = scene.scene_id;
            rec.sample.pose = pose;
            rec.sample.progress = detail::polyline_progress(track, state.position, next_gate);
            rec.sample.obs = obs;
            result.observations.push_back(std::move(rec));
        }

        const SimState prev = state;
        state = step_dynamics(state, exec_cmd, params.dt, params);

        StepRecord rec;
        rec.t = t;
        rec.rewards = reward_terms(prev, state, prev_cmd, exec_cmd, track, next_gate, weights);
        rec.imu = detail::measure_imu(state, exec_cmd.thrust, params, imu_noise,
                                      cfg.imu_noise ? &imu_rng : nullptr);
        tick_input.imu_block.push_back(rec.imu);
        prev_cmd = exec_cmd;

        if (rec.rewards.passed_gate) {
            ++result.gates_passed;
            next_gate = (next_gate + 1) % n_gates;
        }
        if (rec.rewards.crashed) result.crashed = true;

        rec.state = state;
        rec.obs_index = (t % kControlDecimation == 0)
                            ? static_cast<int>(result.observations.size()) - 1
                            : -1;
        rec.teacher_cmd = teacher_cmd;
        rec.exec_cmd = exec_cmd;
        rec.gate_index = next_gate;
        rec.progress = detail::polyline_progress(track, state.position, next_gate);
        result.total_reward += rec.rewards.total;
        result.steps.push_back(std::move(rec));

        if (result.crashed) break;
        if (result.gates_passed >= result.gates_required) {
            result.finished = true;
            break;
        }
    }
    result.gates_passed = std::min(result.gates_passed, result.gates_required);
    return result;
}

inline nlohmann::json command_to_json(const Command& c) {
    return nlohmann::json::array(
        {c.thrust, c.body_rate_cmd.x, c.body_rate_cmd.y, c.body_rate_cmd.z});
}

inline Command command_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::runtime_error("command_from_json: expected array of 4");
    return Command{j[0].get<double>(),
                   Vec3{j[1].get<double>(), j[2].get<double>(), j[3].get<double>()}};
}

inline nlohmann::json step_to_json(const StepRecord& r) {
    return nlohmann::json{
        {"t", r.t},
        {"state",
         {{"p", {r.state.position.x, r.state.position.y, r.state.position.z}},
          {"v", {r.state.velocity.x, r.state.velocity.y, r.state.velocity.z}},
          {"q", {r.state.attitude.w, r.state.attitude.x, r.state.attitude.y, r.state.attitude.z}},
          {"w", {r.state.body_rates.x, r.state.body_rates.y, r.state.body_rates.z}}}},
        {"obs_index", r.obs_index},
        {"imu", r.imu},
        {"teacher_cmd", command_to_json(r.teacher_cmd)},
        {"exec_cmd", command_to_json(r.exec_cmd)},
        {"rewards",
         {{"prog", r.rewards.prog},
          {"perc", r.rewards.perc},
          {"act", r.rewards.act},
          {"br", r.rewards.br},
          {"pass", r.rewards.pass},
          {"crash", r.rewards.crash},
          {"total", r.rewards.total},
          {"passed_gate", r.rewards.passed_gate},
          {"crashed", r.rewards.crashed}}},
        {"gate_index", r.gate_index},
        {"progress", r.progress}};
}

inline StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord r;
    r.t = j.at("t").get<int>();
    const auto& s = j.at("state");
    const auto& p = s.at("p");
    const auto& v = s.at("v");
    const auto& q = s.at("q");
    const auto& w = s.at("w");
    r.state.position = Vec3{p[0], p[1], p[2]};
    r.state.velocity = Vec3{v[0], v[1], v[2]};
    r.state.attitude = Quat{q[0], q[1], q[2], q[3]};
    r.state.body_rates = Vec3{w[0], w[1], w[2]};
    r.obs_index = j.at("obs_index").get<int>();
    const auto& imu = j.at("imu");
    for (std::size_t i = 0; i < 6; ++i) r.imu[i] = imu[i].get<double>();
    r.teacher_cmd = command_from_json(j.at("teacher_cmd"));
    r.exec_cmd = command_from_json(j.at("exec_cmd"));
    const auto& rw = j.at("rewards");
    r.rewards.prog = rw.at("prog").get<double>();
    r.rewards.perc = rw.at("perc").get<double>();
    r.rewards.act = rw.at("act").get<double>();
    r.rewards.br = rw.at("br").get<double>();
    r.rewards.pass = rw.at("pass").get<double>();
    r.rewards.crash = rw.at("crash").get<double>();
    r.rewards.total = rw.at("total").get<double>();
    r.rewards.passed_gate = rw.at("passed_gate").get<bool>();
    r.rewards.crashed = rw.at("crashed").get<bool>();
    r.gate_index = j.at("gate_index").get<int>();
    r.progress = j.at("progress").get<double>();
    return r;
}

// A rollout is stored as two JSONL files sharing a prefix: <prefix>.trace.jsonl
// with one step record per line and <prefix>.obs.jsonl with the control-tick
// observations in obs_index order.
inline void write_rollout(const RolloutResult& result, const std::string& prefix) {
    {
        std::ofstream out(prefix + ".trace.jsonl");
        if (!out) throw std::runtime_error("write_rollout: cannot open " + prefix + ".trace.jsonl");
        for (const StepRecord& r : result.steps) out << step_to_json(r).dump() << '\n';
        if (!out) throw std::runtime_error("write_rollout: write failed");
    }
    std::ofstream out(prefix + ".obs.jsonl");
    if (!out) throw std::runtime_error("write_rollout: cannot open " + prefix + ".obs.jsonl");
    for (const ObsRecord& r : result.observations)
        out << sample_to_json(r.sample).dump() << '\n';
    if (!out) throw std::runtime_error("write_rollout: write failed");
}

inline RolloutResult read_rollout(const std::string& prefix) {
    RolloutResult result;
    {
        std::ifstream in(prefix + ".trace.jsonl");
        if (!in) throw std::runtime_error("read_rollout: cannot open " + prefix + ".trace.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            result.steps.push_back(step_from_json(nlohmann::json::parse(line)));
        }
    }
    std::ifstream in(prefix + ".obs.jsonl");
    if (!in) throw std::runtime_error("read_rollout: cannot open " + prefix + ".obs.jsonl");
    std::string line;
    int tick = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ObsRecord rec;
        rec.tick = tick++;
        rec.sample = sample_from_json(nlohmann::json::parse(line));
        result.observations.push_back(std::move(rec));
    }
    for (const StepRecord& r : result.steps) {
        if (r.obs_index >= 0) {
            if (static_cast<std::size_t>(r.obs_index) >= result.observations.size())
                throw std::runtime_error("read_rollout: obs_index out of range");
            result.observations[static_cast<std::size_t>(r.obs_index)].step = r.t;
        }
        if (r.rewards.crashed) result.crashed = true;
        if (r.rewards.passed_gate) ++result.gates_passed;
        result.total_reward += r.rewards.total;
    }
    return result;
}

}  // namespace scenic
