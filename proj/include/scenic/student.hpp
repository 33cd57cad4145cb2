#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/adam.hpp"
#include "scenic/contrastive.hpp"
#include "scenic/mlp.hpp"
#include "scenic/rng.hpp"
#include "scenic/rollout.hpp"

namespace scenic {

struct TcnLayerSpec {
    int in_ch = 0;
    int out_ch = 0;
    int kernel = 3;
    int dilation = 1;
};

// Causal temporal convolution stack with tanh activations, read out at the
// last timestep. Inputs earlier than the window are implicit zeros. Rows
// outside the receptive field of the readout are skipped in both passes.
class Tcn {
public:
    Tcn() = default;
    explicit Tcn(std::vector<TcnLayerSpec> specs) : specs_(std::move(specs)) {
        if (specs_.empty()) throw std::invalid_argument("Tcn: no layers");
        std::size_t total = 0;
        for (const TcnLayerSpec& s : specs_) {
            if (s.in_ch < 1 || s.out_ch < 1 || s.kernel < 1 || s.dilation < 1)
                throw std::invalid_argument("Tcn: bad layer spec");
            offsets_.push_back(total);
            total += static_cast<std::size_t>(s.out_ch) * s.kernel * s.in_ch + s.out_ch;
        }
        params_.assign(total, 0.0);
    }

    static Tcn xavier_init(std::vector<TcnLayerSpec> specs, Rng& rng) {
        Tcn t(std::move(specs));
        for (std::size_t l = 0; l < t.specs_.size(); ++l) {
            const TcnLayerSpec& s = t.specs_[l];
            const double fan_in = static_cast<double>(s.in_ch) * s.kernel;
            const double fan_out = static_cast<double>(s.out_ch) * s.kernel;
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            double* w = t.params_.data() + t.offsets_[l];
            const std::size_t n_w = static_cast<std::size_t>(s.out_ch) * s.kernel * s.in_ch;
            for (std::size_t i = 0; i < n_w; ++i) w[i] = rng.uniform(-bound, bound);
        }
        return t;
    }

    struct Cache {
        int T = 0;
        std::vector<std::vector<double>> acts;  // acts[l] is time-major [T * C_l]
        std::vector<int> first_row;             // first computed row per layer output
    };

    int input_dim() const { return specs_.front().in_ch; }
    int output_dim() const { return specs_.back().out_ch; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<TcnLayerSpec>& specs() const { return specs_; }

    // window: time-major [T * in_ch], oldest row first.
    std::vector<double> forward(const std::vector<double>& window, int T,
                                Cache* cache = nullptr) const {
        if (T < 1 || window.size() != static_cast<std::size_t>(T) * input_dim())
            throw std::invalid_argument("Tcn::forward: window size mismatch");
        const std::vector<int> first = first_rows(T);
        std::vector<double> cur = window;
        Cache local;
        Cache& c = cache ? *cache : local;
        c.T = T;
        c.first_row = first;
        c.acts.clear();
        c.acts.push_back(cur);
        for (std::size_t l = 0; l < specs_.size(); ++l) {
            const TcnLayerSpec& s = specs_[l];
            const double* w = params_.data() + offsets_[l];
            const double* b = w + static_cast<std::size_t>(s.out_ch) * s.kernel * s.in_ch;
            std::vector<double> next(static_cast<std::size_t>(T) * s.out_ch, 0.0);
            for (int t = first[l]; t < T; ++t) {
                for (int co = 0; co < s.out_ch; ++co) {
                    double acc = b[co];
                    for (int k = 0; k < s.kernel; ++k) {
                        const int src = t - s.dilation * (s.kernel - 1 - k);
                        if (src < 0) continue;
                        const double* wrow =
                            w + (static_cast<std::size_t>(co) * s.kernel + k) * s.in_ch;
                        const double* xrow = cur.data() + static_cast<std::size_t>(src) * s.in_ch;
                        for (int ci = 0; ci < s.in_ch; ++ci) acc += wrow[ci] * xrow[ci];
                    }
                    next[static_cast<std::size_t>(t) * s.out_ch + co] = std::tanh(acc);
                }
            }
            cur = std::move(next);
            c.acts.push_back(cur);
        }
        return std::vector<double>(cur.end() - output_dim(), cur.end());
    }

    // dlast: loss gradient at the last-timestep output. Accumulates into grad
    // (same layout as params). Input gradients are not propagated further.
    void backprop(const Cache& cache, const std::vector<double>& dlast,
                  std::vector<double>& grad) const {
        if (dlast.size() != static_cast<std::size_t>(output_dim()) ||
            grad.size() != params_.size() || cache.acts.size() != specs_.size() + 1)
            throw std::invalid_argument("Tcn::backprop: size mismatch");
        const int T = cache.T;
        std::vector<double> dout(static_cast<std::size_t>(T) * output_dim(), 0.0);
        std::copy(dlast.begin(), dlast.end(), dout.end() - output_dim());
        for (std::size_t li = specs_.size(); li-- > 0;) {
            const TcnLayerSpec& s = specs_[li];
            const double* w = params_.data() + offsets_[li];
            double* gw = grad.data() + offsets_[li];
            double* gb = gw + static_cast<std::size_t>(s.out_ch) * s.kernel * s.in_ch;
            const std::vector<double>& a_out = cache.acts[li + 1];
            const std::vector<double>& a_in = cache.acts[li];
            std::vector<double> din(static_cast<std::size_t>(T) * s.in_ch, 0.0);
            for (int t = cache.first_row[li]; t < T; ++t) {
                for (int co = 0; co < s.out_ch; ++co) {
                    const double a = a_out[static_cast<std::size_t>(t) * s.out_ch + co];
                    const double g = dout[static_cast<std::size_t>(t) * s.out_ch + co] *
                                     (1.0 - a * a);
                    if (g == 0.0) continue;
                    gb[co] += g;
                    for (int k = 0; k < s.kernel; ++k) {
                        const int src = t - s.dilation * (s.kernel - 1 - k);
                        if (src < 0) continue;
                        const std::size_t woff =
                            (static_cast<std::size_t>(co) * s.kernel + k) * s.in_ch;
                        const double* xrow = a_in.data() + static_cast<std::size_t>(src) * s.in_ch;
                        double* drow = din.data() + static_cast<std::size_t>(src) * s.in_ch;
                        for (int ci = 0; ci < s.in_ch; ++ci) {
                            gw[woff + ci] += g * xrow[ci];
                            drow[ci] += g * w[woff + ci];
                        }
                    }
                }
            }
            dout = std::move(din);
        }
    }

private:
    std::vector<int> first_rows(int T) const {
        std::vector<int> first(specs_.size());
        int need = T - 1;
        for (std::size_t li = specs_.size(); li-- > 0;) {
            first[li] = std::max(0, need);
            need -= specs_[li].dilation * (specs_[li].kernel - 1);
        }
        return first;
    }

    std::vector<TcnLayerSpec> specs_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

struct StudentConfig {
    int emb_dim = 32;
    int emb_history = 12;   // control ticks
    int imu_history = 72;   // dynamics steps
    int channels = 32;
    int head_hidden = 64;
};

// Two-branch policy: embedding-history TCN and IMU-history TCN, last-step
// features concatenated into an MLP head. Thrust is squashed by a sigmoid,
// body rates by tanh scaled to the rate limit.
class Student {
public:
    Student() = default;
    explicit Student(const StudentConfig& cfg) : cfg_(cfg) {
        emb_branch_ = Tcn(emb_specs(cfg));
        imu_branch_ = Tcn(imu_specs(cfg));
        head_ = Mlp({2 * cfg.channels, cfg.head_hidden, 4});
    }

    static Student init(const StudentConfig& cfg, Rng& rng) {
        Student s(cfg);
        Rng emb_rng = rng.split("student-emb-branch");
        Rng imu_rng = rng.split("student-imu-branch");
        Rng head_rng = rng.split("student-head");
        s.emb_branch_ = Tcn::xavier_init(emb_specs(cfg), emb_rng);
        s.imu_branch_ = Tcn::xavier_init(imu_specs(cfg), imu_rng);
        s.head_ = Mlp::xavier_init({2 * cfg.channels, cfg.head_hidden, 4}, head_rng);
        s.head_.scale_output_layer(0.1);  // start near hover: sigmoid(0) = hover thrust
        return s;
    }

    struct Forward {
        Tcn::Cache emb_cache, imu_cache;
        Mlp::Cache head_cache;
        std::vector<double> raw;
        Command cmd;
    };

    Forward forward(const std::vector<double>& emb_window,
                    const std::vector<double>& imu_window, double rate_limit) const {
        Forward f;
        const std::vector<double> emb_feat =
            emb_branch_.forward(emb_window, cfg_.emb_history, &f.emb_cache);
        const std::vector<double> imu_feat =
            imu_branch_.forward(imu_window, cfg_.imu_history, &f.imu_cache);
        std::vector<double> concat = emb_feat;
        concat.insert(concat.end(), imu_feat.begin(), imu_feat.end());
        f.raw = head_.forward(concat, &f.head_cache);
        f.cmd.thrust = 1.0 / (1.0 + std::exp(-f.raw[0]));
        f.cmd.body_rate_cmd = Vec3{std::tanh(f.raw[1]), std::tanh(f.raw[2]),
                                   std::tanh(f.raw[3])} *
                              rate_limit;
        return f;
    }

    Command act(const std::vector<double>& emb_window, const std::vector<double>& imu_window,
                double rate_limit) const {
        return forward(emb_window, imu_window, rate_limit).cmd;
    }

    struct Grads {
        std::vector<double> emb_branch, imu_branch, head;

        explicit Grads(const Student& s)
            : emb_branch(s.emb_branch_.param_count(), 0.0),
              imu_branch(s.imu_branch_.param_count(), 0.0),
              head(s.head_.param_count(), 0.0) {}

        void zero() {
            std::fill(emb_branch.begin(), emb_branch.end(), 0.0);
            std::fill(imu_branch.begin(), imu_branch.end(), 0.0);
            std::fill(head.begin(), head.end(), 0.0);
        }
        void scale(double c) {
            for (auto& g : emb_branch) g *= c;
            for (auto& g : imu_branch) g *= c;
            for (auto& g : head) g *= c;
        }
    };

    // dcmd: gradient w.r.t. the squashed command (thrust, wx, wy, wz).
    void backprop(const Forward& f, const std::array<double, 4>& dcmd, double rate_limit,
                  Grads& grads) const {
        std::vector<double> draw(4);
        const double sig = f.cmd.thrust;
        draw[0] = dcmd[0] * sig * (1.0 - sig);
        const double rates[3] = {f.cmd.body_rate_cmd.x, f.cmd.body_rate_cmd.y,
                                 f.cmd.body_rate_cmd.z};
        for (int i = 0; i < 3; ++i) {
            const double th = rates[i] / rate_limit;
            draw[static_cast<std::size_t>(i) + 1] =
                dcmd[static_cast<std::size_t>(i) + 1] * rate_limit * (1.0 - th * th);
        }
        const std::vector<double> dconcat = head_.backprop(f.head_cache, draw, grads.head);
        const std::vector<double> demb(dconcat.begin(), dconcat.begin() + cfg_.channels);
        const std::vector<double> dimu(dconcat.begin() + cfg_.channels, dconcat.end());
        emb_branch_.backprop(f.emb_cache, demb, grads.emb_branch);
        imu_branch_.backprop(f.imu_cache, dimu, grads.imu_branch);
    }

    const StudentConfig& config() const { return cfg_; }
    Tcn& emb_branch() { return emb_branch_; }
    Tcn& imu_branch() { return imu_branch_; }
    Mlp& head() { return head_; }
    const Tcn& emb_branch() const { return emb_branch_; }
    const Tcn& imu_branch() const { return imu_branch_; }
    const Mlp& head() const { return head_; }

private:
    static std::vector<TcnLayerSpec> emb_specs(const StudentConfig& c) {
        return {{c.emb_dim, c.channels, 3, 1}, {c.channels, c.channels, 3, 2}};
    }
    static std::vector<TcnLayerSpec> imu_specs(const StudentConfig& c) {
        return {{6, c.channels, 3, 1}, {c.channels, c.channels, 3, 2},
                {c.channels, c.channels, 3, 4}};
    }

    StudentConfig cfg_;
    Tcn emb_branch_;
    Tcn imu_branch_;
    Mlp head_;
};

// Normalized command error: thrust is already in [0, 1], body rates are
// divided by the rate limit. Training minimizes the squared norm; evaluation
// reports the plain norm.
inline std::array<double, 4> command_error(const Command& pred, const Command& label,
                                           double rate_limit) {
    return {pred.thrust - label.thrust,
            (pred.body_rate_cmd.x - label.body_rate_cmd.x) / rate_limit,
            (pred.body_rate_cmd.y - label.body_rate_cmd.y) / rate_limit,
            (pred.body_rate_cmd.z - label.body_rate_cmd.z) / rate_limit};
}

inline double action_loss(const Command& pred, const Command& label, double rate_limit) {
    const auto e = command_error(pred, label, rate_limit);
    return e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[3] * e[3];
}

// Loss and parameter gradients for one (windows, label) pair.
inline double action_loss_grad(const Student& student, const std::vector<double>& emb_window,
                               const std::vector<double>& imu_window, const Command& label,
                               double rate_limit, Student::Grads& grads) {
    const Student::Forward f = student.forward(emb_window, imu_window, rate_limit);
    const auto e = command_error(f.cmd, label, rate_limit);
    std::array<double, 4> dcmd{2.0 * e[0], 2.0 * e[1] / rate_limit, 2.0 * e[2] / rate_limit,
                               2.0 * e[3] / rate_limit};
    student.backprop(f, dcmd, rate_limit, grads);
    return e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[3] * e[3];
}

inline std::array<double, 6> normalize_imu(const std::array<double, 6>& imu,
                                           const QuadParams& params) {
    std::array<double, 6> out{};
    for (int i = 0; i < 3; ++i)
        out[static_cast<std::size_t>(i)] = imu[static_cast<std::size_t>(i)] / params.body_rate_limit;
    for (int i = 3; i < 6; ++i)
        out[static_cast<std::size_t>(i)] = imu[static_cast<std::size_t>(i)] / params.max_thrust_accel;
    return out;
}

// The contrastive objective constrains embedding directions, not norms, so
// the policy consumes unit vectors.
inline std::vector<double> normalize_emb(std::vector<double> emb) {
    const double n = l2_norm(emb);
    if (n <= 0.0) throw std::domain_error("normalize_emb: zero-norm embedding");
    for (double& v : emb) v /= n;
    return emb;
}

// Per-rollout training material: unit-norm frozen-encoder embeddings per
// tick, normalized IMU per dynamics step, teacher labels per tick.
struct DaggerRollout {
    std::vector<std::vector<double>> embs;
    std::vector<int> tick_step;
    std::vector<Command> labels;
    std::vector<std::array<double, 6>> imu;
};

inline DaggerRollout make_dagger_rollout(const RolloutResult& r, const Encoder& encoder,
                                         const QuadParams& params) {
    DaggerRollout d;
    d.embs.reserve(r.observations.size());
    d.tick_step.reserve(r.observations.size());
    d.labels.reserve(r.observations.size());
    for (const ObsRecord& o : r.observations) {
        d.embs.push_back(normalize_emb(encoder.embed(o.sample.obs)));
        d.tick_step.push_back(o.step);
    }
    d.imu.reserve(r.steps.size());
    for (const StepRecord& s : r.steps) d.imu.push_back(normalize_imu(s.imu, params));
    for (int step : d.tick_step) {
        if (step < 0 || static_cast<std::size_t>(step) >= r.steps.size())
            throw std::runtime_error("make_dagger_rollout: tick step out of range");
        d.labels.push_back(r.steps[static_cast<std::size_t>(step)].teacher_cmd);
    }
    return d;
}

// Builds the zero-padded time-major windows for one tick: embeddings for
// ticks (tick - H + 1 .. tick), IMU for dynamics steps strictly before the
// tick's step.
inline void fill_windows(const DaggerRollout& d, int tick, const StudentConfig& cfg,
                         std::vector<double>& emb_window, std::vector<double>& imu_window) {
    const int De = cfg.emb_dim;
    emb_window.assign(static_cast<std::size_t>(cfg.emb_history) * De, 0.0);
    for (int i = 0; i < cfg.emb_history; ++i) {
        const int src = tick - (cfg.emb_history - 1 - i);
        if (src < 0) continue;
        const std::vector<double>& e = d.embs[static_cast<std::size_t>(src)];
        std::copy(e.begin(), e.end(), emb_window.begin() + static_cast<std::size_t>(i) * De);
    }
    imu_window.assign(static_cast<std::size_t>(cfg.imu_history) * 6, 0.0);
    const int end_step = d.tick_step[static_cast<std::size_t>(tick)];
    for (int i = 0; i < cfg.imu_history; ++i) {
        const int src = end_step - cfg.imu_history + i;
        if (src < 0) continue;
        const std::array<double, 6>& m = d.imu[static_cast<std::size_t>(src)];
        std::copy(m.begin(), m.end(), imu_window.begin() + static_cast<std::size_t>(i) * 6);
    }
}

// Online controller with the same window semantics as fill_windows: the
// embedding ring includes the current tick, the IMU ring holds the steps
// before it.
class StudentController {
public:
    StudentController(const Encoder& encoder, const Student& student, const QuadParams& params)
        : encoder_(&encoder), student_(&student), params_(params) {
        reset();
    }

    void reset() {
        const StudentConfig& cfg = student_->config();
        emb_window_.assign(static_cast<std::size_t>(cfg.emb_history) * cfg.emb_dim, 0.0);
        imu_window_.assign(static_cast<std::size_t>(cfg.imu_history) * 6, 0.0);
    }

    Command operator()(const ControlTickInput& in) {
        const StudentConfig& cfg = student_->config();
        for (const std::array<double, 6>& raw : in.imu_block) {
            const std::array<double, 6> m = normalize_imu(raw, params_);
            std::copy(imu_window_.begin() + 6, imu_window_.end(), imu_window_.begin());
            std::copy(m.begin(), m.end(), imu_window_.end() - 6);
        }
        const std::vector<double> emb = normalize_emb(encoder_->embed(in.obs));
        std::copy(emb_window_.begin() + cfg.emb_dim, emb_window_.end(), emb_window_.begin());
        std::copy(emb.begin(), emb.end(), emb_window_.end() - cfg.emb_dim);
        return student_->act(emb_window_, imu_window_, params_.body_rate_limit);
    }

private:
    const Encoder* encoder_;
    const Student* student_;
    QuadParams params_;
    std::vector<double> emb_window_;
    std::vector<double> imu_window_;
};

struct StudentTrainConfig {
    int iterations = 10;
    int rollouts_per_iter = 8;
    int laps = 2;
    int epochs_per_iter = 2;
    int batch = 512;
    int sample_stride = 3;
    double cmd_jitter = 0.05;
    double lr_start = 1e-3;
    double lr_end = 1e-5;
    int lr_decay_epochs = 50;
    StudentConfig arch;
    std::uint64_t seed = 1;
    std::string config_hash;
};

struct StudentIterLogRow {
    int iteration = 0;
    int epoch = 0;  // cumulative across iterations
    double loss = 0.0;
    double beta = 0.0;
    double lr = 0.0;
    double rollout_sr = 0.0;
};

struct StudentTrainResult {
    Student student;
    std::vector<StudentIterLogRow> log;
};

// Privileged imitation: per iteration, collect rollouts executing the
// teacher's command with probability beta (annealed 1 -> 0) and the student's
// otherwise, label every visited tick with the teacher, then fit the action
// loss on the aggregate with Adam.
inline StudentTrainResult train_student(const Track& track, const std::vector<Scene>& scenes,
                                        const Encoder& encoder, const QuadParams& params,
                                        const TeacherGains& gains, const RewardWeights& weights,
                                        const StudentTrainConfig& cfg) {
    if (scenes.empty()) throw std::invalid_argument("train_student: no training scenes");
    if (cfg.iterations < 1) throw std::invalid_argument("train_student: iterations must be >= 1");
    if (encoder.embedding_dim() != cfg.arch.emb_dim)
        throw std::invalid_argument("train_student: encoder embedding dim mismatch");

    const Rng base(cfg.seed);
    Rng init_rng = base.split("student-init");
    StudentTrainResult result;
    result.student = Student::init(cfg.arch, init_rng);
    Student& student = result.student;

    Adam adam_emb(student.emb_branch().param_count());
    Adam adam_imu(student.imu_branch().param_count());
    Adam adam_head(student.head().param_count());
    const LinearLrSchedule sched{cfg.lr_start, cfg.lr_end,
                                 static_cast<std::size_t>(cfg.lr_decay_epochs)};
    Rng batch_rng = base.split("student-batches");

    std::vector<DaggerRollout> store;
    std::vector<std::pair<int, int>> index;  // (rollout, tick)
    Student::Grads grads(student);
    std::vector<double> emb_window, imu_window;
    int cumulative_epoch = 0;

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        const double beta =
            cfg.iterations > 1 ? 1.0 - static_cast<double>(iter) / (cfg.iterations - 1) : 0.0;
        int finished = 0;
        for (int r = 0; r < cfg.rollouts_per_iter; ++r) {
            const Scene& scene = scenes[static_cast<std::size_t>(r) % scenes.size()];
            StudentController controller(encoder, student, params);
            RolloutConfig rc;
            rc.mode = PolicyMode::Mixed;
            rc.beta = beta;
            rc.laps = cfg.laps;
            rc.cmd_jitter = cfg.cmd_jitter;
            rc.seed = base.split("dagger-rollout", static_cast<std::uint64_t>(iter) * 1000 +
                                                       static_cast<std::uint64_t>(r))
                          .seed();
            const RolloutResult rr = run_rollout(track, scene, params, gains, weights, rc,
                                                 std::ref(controller));
            if (rr.finished) ++finished;
            const int rollout_id = static_cast<int>(store.size());
            store.push_back(make_dagger_rollout(rr, encoder, params));
            const DaggerRollout& d = store.back();
            for (int tick = 0; tick < static_cast<int>(d.embs.size()); ++tick)
                if (tick % cfg.sample_stride == 0) index.emplace_back(rollout_id, tick);
        }
        const double rollout_sr = static_cast<double>(finished) / cfg.rollouts_per_iter;
        if (iter == 0 && beta == 1.0 && finished == 0)
            throw std::runtime_error(
                "train_student: teacher-driven rollouts all failed; expert or track is broken");

        const int steps_per_epoch =
            std::max(1, static_cast<int>(index.size()) / cfg.batch);
        for (int epoch = 0; epoch < cfg.epochs_per_iter; ++epoch) {
            const double lr = sched.at(static_cast<std::size_t>(cumulative_epoch));
            double epoch_loss = 0.0;
            for (int step = 0; step < steps_per_epoch; ++step) {
                grads.zero();
                double loss = 0.0;
                for (int b = 0; b < cfg.batch; ++b) {
                    const auto& [rid, tick] = index[batch_rng.index(index.size())];
                    fill_windows(store[static_cast<std::size_t>(rid)], tick, cfg.arch,
                                 emb_window, imu_window);
                    loss += action_loss_grad(student, emb_window, imu_window,
                                             store[static_cast<std::size_t>(rid)]
                                                 .labels[static_cast<std::size_t>(tick)],
                                             params.body_rate_limit, grads);
                }
                loss /= cfg.batch;
                if (!std::isfinite(loss))
                    throw std::runtime_error("train_student: loss diverged at iteration " +
                                             std::to_string(iter));
                grads.scale(1.0 / cfg.batch);
                adam_emb.step(student.emb_branch().params(), grads.emb_branch, lr);
                adam_imu.step(student.imu_branch().params(), grads.imu_branch, lr);
                adam_head.step(student.head().params(), grads.head, lr);
                epoch_loss += loss;
            }
            epoch_loss /= steps_per_epoch;
            result.log.push_back(
                {iter, cumulative_epoch, epoch_loss, beta, lr, rollout_sr});
            ++cumulative_epoch;
        }
    }
    return result;
}

inline nlohmann::json student_to_json(const Student& s, const std::string& config_hash,
                                      std::uint64_t seed, const std::string& encoder_strategy) {
    const StudentConfig& c = s.config();
    return nlohmann::json{{"type", "student"},
                          {"emb_dim", c.emb_dim},
                          {"emb_history", c.emb_history},
                          {"imu_history", c.imu_history},
                          {"channels", c.channels},
                          {"head_hidden", c.head_hidden},
                          {"emb_branch", s.emb_branch().params()},
                          {"imu_branch", s.imu_branch().params()},
                          {"head", s.head().params()},
                          {"config_hash", config_hash},
                          {"seed", seed},
                          {"encoder_strategy", encoder_strategy}};
}

inline Student student_from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "student")
        throw std::runtime_error("student_from_json: not a student checkpoint");
    StudentConfig c;
    c.emb_dim = j.at("emb_dim").get<int>();
    c.emb_history = j.at("emb_history").get<int>();
    c.imu_history = j.at("imu_history").get<int>();
    c.channels = j.at("channels").get<int>();
    c.head_hidden = j.at("head_hidden").get<int>();
    Student s(c);
    const auto load = [](std::vector<double>& dst, const nlohmann::json& src,
                         const char* name) {
        std::vector<double> v = src.get<std::vector<double>>();
        if (v.size() != dst.size())
            throw std::runtime_error(std::string("student_from_json: ") + name +
                                     " parameter count mismatch");
        dst = std::move(v);
    };
    load(s.emb_branch().params(), j.at("emb_branch"), "emb_branch");
    load(s.imu_branch().params(), j.at("imu_branch"), "imu_branch");
    load(s.head().params(), j.at("head"), "head");
    return s;
}

inline void save_student(const Student& s, const std::string& path,
                         const std::string& config_hash, std::uint64_t seed,
                         const std::string& encoder_strategy) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_student: cannot open " + path);
    out << student_to_json(s, config_hash, seed, encoder_strategy).dump();
    if (!out) throw std::runtime_error("save_student: write failed for " + path);
}

inline Student load_student(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_student: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return student_from_json(j);
}

}  // namespace scenic
