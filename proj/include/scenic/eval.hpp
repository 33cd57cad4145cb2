#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/contrastive.hpp"
#include "scenic/dataset.hpp"
#include "scenic/rollout.hpp"
#include "scenic/student.hpp"
#include "scenic/track.hpp"

namespace scenic {

constexpr int kDefaultIntraBins = 20;
constexpr double kIntraBinSpan = 0.5;

struct IntraAccum {
    std::vector<double> sum;
    std::vector<std::size_t> count;

    explicit IntraAccum(int n_bins = kDefaultIntraBins)
        : sum(static_cast<std::size_t>(n_bins), 0.0),
          count(static_cast<std::size_t>(n_bins), 0) {}

    void merge(const IntraAccum& other) {
        if (other.sum.size() != sum.size())
            throw std::invalid_argument("IntraAccum::merge: bin count mismatch");
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += other.sum[i];
            count[i] += other.count[i];
        }
    }

    // Pooled mean similarity over bins whose centers fall in [lo, hi].
    double pooled_mean(double lo, double hi) const {
        const double width = kIntraBinSpan / static_cast<double>(sum.size());
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < sum.size(); ++i) {
            const double center = (static_cast<double>(i) + 0.5) * width;
            if (center < lo || center > hi) continue;
            s += sum[i];
            n += count[i];
        }
        if (n == 0) throw std::runtime_error("IntraAccum: no pairs in requested range");
        return s / static_cast<double>(n);
    }
};

struct IntraBin {
    double center = 0.0;
    double mean_sim = 0.0;
    std::size_t count = 0;
};

struct ConsistencyReport {
    std::vector<IntraBin> intra;  // empty bins omitted
    double inter_mu = 0.0;
    double inter_iqr = 0.0;
    std::size_t n_samples = 0;
};

// Similarity of each anchor to every other same-scene sample, bucketed by
// circular progress difference. Call once per scene and merge.
inline void intra_accumulate(const Encoder& encoder, const Dataset& dataset,
                             std::size_t n_anchors, Rng& rng, IntraAccum& accum) {
    const std::size_t n = dataset.samples.size();
    if (n < 2) throw std::invalid_argument("intra_accumulate: need at least 2 samples");
    if (dataset.scene_ids().size() != 1)
        throw std::invalid_argument("intra_accumulate: dataset must come from one scene");

    std::vector<std::vector<double>> embs(n);
    for (std::size_t i = 0; i < n; ++i) embs[i] = encoder.embed(dataset.samples[i].obs);

    std::vector<std::size_t> anchors;
    if (n_anchors >= n) {
        anchors.resize(n);
        for (std::size_t i = 0; i < n; ++i) anchors[i] = i;
    } else {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < n_anchors; ++i) {
            const std::size_t j = i + rng.index(n - i);
            std::swap(pool[i], pool[j]);
            anchors.push_back(pool[i]);
        }
    }

    const int n_bins = static_cast<int>(accum.sum.size());
    const double width = kIntraBinSpan / n_bins;
    for (std::size_t a : anchors) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == a) continue;
            const double diff =
                progress_diff(dataset.samples[a].progress, dataset.samples[i].progress);
            int bin = static_cast<int>(diff / width);
            if (bin >= n_bins) bin = n_bins - 1;  // diff == 0.5 lands in the last bin
            accum.sum[static_cast<std::size_t>(bin)] += cosine_similarity(embs[a], embs[i]);
            accum.count[static_cast<std::size_t>(bin)] += 1;
        }
    }
}

inline std::vector<IntraBin> finalize_intra(const IntraAccum& accum) {
    std::vector<IntraBin> bins;
    const double width = kIntraBinSpan / static_cast<double>(accum.sum.size());
    for (std::size_t i = 0; i < accum.sum.size(); ++i) {
        if (accum.count[i] == 0) continue;
        bins.push_back({(static_cast<double>(i) + 0.5) * width,
                        accum.sum[i] / static_cast<double>(accum.count[i]), accum.count[i]});
    }
    return bins;
}

inline std::vector<IntraBin> intra_consistency(const Encoder& encoder, const Dataset& dataset,
                                               std::size_t n_anchors, int n_bins, Rng& rng) {
    IntraAccum accum(n_bins);
    intra_accumulate(encoder, dataset, n_anchors, rng, accum);
    return finalize_intra(accum);
}

inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct InterConsistency {
    double mu = 0.0;
    double iqr = 0.0;
    std::size_t n_pairs = 0;
};

// For each sampled pose, render the same pose in every scene and pool all
// pairwise cross-scene embedding similarities.
inline InterConsistency inter_consistency(const Encoder& encoder, const Track& track,
                                          const std::vector<Scene>& scenes,
                                          std::size_t n_poses, Rng& rng) {
    if (scenes.size() < 2)
        throw std::invalid_argument("inter_consistency: need at least 2 scenes");
    std::vector<double> sims;
    sims.reserve(n_poses * scenes.size() * (scenes.size() - 1) / 2);
    std::vector<std::vector<double>> embs(scenes.size());
    const ObservationModel obs_model(track);
    for (std::size_t k = 0; k < n_poses; ++k) {
        const Pose pose = sample_track_pose(track, rng);
        for (std::size_t s = 0; s < scenes.size(); ++s)
            embs[s] = encoder.embed(obs_model.render(scenes[s], pose));
        for (std::size_t i = 0; i < scenes.size(); ++i)
            for (std::size_t j = i + 1; j < scenes.size(); ++j)
                sims.push_back(cosine_similarity(embs[i], embs[j]));
    }
    InterConsistency out;
    out.n_pairs = sims.size();
    double acc = 0.0;
    for (double s : sims) acc += s;
    out.mu = acc / static_cast<double>(sims.size());
    out.iqr = quantile(sims, 0.75) - quantile(sims, 0.25);
    return out;
}

// Mean action loss of the student along a recorded teacher rollout, replaying
// the same observation and IMU stream the onboard controller would see.
inline double open_loop_action_error(const Encoder& encoder, const Student& student,
                                     const RolloutResult& reference,
                                     const QuadParams& params) {
    if (reference.observations.empty())
        throw std::invalid_argument("open_loop_action_error: reference trace has no ticks");
    if (encoder.embedding_dim() != student.config().emb_dim)
        throw std::invalid_argument(
            "open_loop_action_error: encoder embedding dim does not match the student");
    const DaggerRollout d = make_dagger_rollout(reference, encoder, params);
    std::vector<double> emb_window, imu_window;
    double total = 0.0;
    for (int tick = 0; tick < static_cast<int>(d.embs.size()); ++tick) {
        fill_windows(d, tick, student.config(), emb_window, imu_window);
        const Command pred = student.act(emb_window, imu_window, params.body_rate_limit);
        total += action_loss(pred, d.labels[static_cast<std::size_t>(tick)],
                             params.body_rate_limit);
    }
    return total / static_cast<double>(d.embs.size());
}

struct ClosedLoopReport {
    double success_rate = 0.0;
    double action_error = 0.0;
    double agp_mean = 0.0;
    double agp_std = 0.0;
    int n_starts = 0;

    void check() const {
        if (success_rate < 0.0 || success_rate > 1.0 || agp_mean < 0.0 || agp_std < 0.0)
            throw std::logic_error("ClosedLoopReport: invariant violated");
    }
};

namespace detail {

inline ClosedLoopReport summarize_episodes(const std::vector<RolloutResult>& episodes,
                                           double rate_limit) {
    ClosedLoopReport rep;
    rep.n_starts = static_cast<int>(episodes.size());
    double err = 0.0;
    std::size_t ticks = 0;
    double agp_sq = 0.0;
    for (const RolloutResult& e : episodes) {
        if (e.finished && !e.crashed) rep.success_rate += 1.0;
        rep.agp_mean += e.gates_passed;
        agp_sq += static_cast<double>(e.gates_passed) * e.gates_passed;
        for (const StepRecord& s : e.steps)
            if (s.obs_index >= 0) {
                err += action_loss(s.exec_cmd, s.teacher_cmd, rate_limit);
                ++ticks;
            }
    }
    const double n = static_cast<double>(episodes.size());
    rep.success_rate /= n;
    rep.agp_mean /= n;
    rep.agp_std = std::sqrt(std::max(0.0, agp_sq / n - rep.agp_mean * rep.agp_mean));
    rep.action_error = ticks ? err / static_cast<double>(ticks) : 0.0;
    rep.check();
    return rep;
}

}  // namespace detail

// 64 deterministic starts by default; every policy sees the same start states
// because episode seeds depend only on the base seed and episode index.
inline ClosedLoopReport closed_loop_eval(const Track& track, const Scene& scene,
                                         const QuadParams& params, const TeacherGains& gains,
                                         const RewardWeights& weights, const Encoder* encoder,
                                         const Student* student, int n_starts, int laps,
                                         std::uint64_t base_seed) {
    if (n_starts < 1) throw std::invalid_argument("closed_loop_eval: n_starts must be >= 1");
    if ((encoder == nullptr) != (student == nullptr))
        throw std::invalid_argument("closed_loop_eval: encoder and student go together");
    const Rng base(base_seed);
    std::vector<RolloutResult> episodes;
    episodes.reserve(static_cast<std::size_t>(n_starts));
    for (int i = 0; i < n_starts; ++i) {
        RolloutConfig rc;
        rc.laps = laps;
        rc.seed = base.split("episode", static_cast<std::uint64_t>(i)).seed();
        if (student) {
            rc.mode = PolicyMode::Student;
            StudentController controller(*encoder, *student, params);
            episodes.push_back(
                run_rollout(track, scene, params, gains, weights, rc, std::ref(controller)));
        } else {
            rc.mode = PolicyMode::Teacher;
            episodes.push_back(run_rollout(track, scene, params, gains, weights, rc));
        }
    }
    return detail::summarize_episodes(episodes, params.body_rate_limit);
}

inline void dump_embeddings(const Encoder& encoder, const Dataset& dataset,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_embeddings: cannot open " + path);
    out << "scene_id,progress";
    for (int i = 1; i <= encoder.embedding_dim(); ++i) out << ",e_" << i;
    out << '\n';
    char buf[32];
    for (const ObservationSample& s : dataset.samples) {
        out << s.scene_id;
        std::snprintf(buf, sizeof buf, ",%.17g", s.progress);
        out << buf;
        for (double v : encoder.embed(s.obs)) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("dump_embeddings: write failed for " + path);
}

inline nlohmann::json consistency_to_json(const ConsistencyReport& r) {
    nlohmann::json intra = nlohmann::json::array();
    for (const IntraBin& b : r.intra)
        intra.push_back({{"center", b.center}, {"mean_sim", b.mean_sim}, {"count", b.count}});
    return nlohmann::json{{"intra", intra},
                          {"inter", {{"mu", r.inter_mu}, {"iqr", r.inter_iqr}}},
                          {"n_samples", r.n_samples}};
}

inline nlohmann::json closed_loop_to_json(const ClosedLoopReport& r) {
    return nlohmann::json{{"success_rate", r.success_rate},
                          {"action_error", r.action_error},
                          {"agp_mean", r.agp_mean},
                          {"agp_std", r.agp_std},
                          {"n_starts", r.n_starts}};
}

}  // namespace scenic
