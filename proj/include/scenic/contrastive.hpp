#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/adam.hpp"
#include "scenic/dataset.hpp"
#include "scenic/mlp.hpp"
#include "scenic/rng.hpp"
#include "scenic/scene.hpp"

namespace scenic {

enum class Strategy { OursAdaptive, OursConstant, AugCL, StateCL, Autoencoder };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::OursAdaptive: return "ours_adaptive";
        case Strategy::OursConstant: return "ours_constant";
        case Strategy::AugCL: return "aug_cl";
        case Strategy::StateCL: return "state_cl";
        case Strategy::Autoencoder: return "autoencoder";
    }
    throw std::invalid_argument("strategy_name: unknown strategy");
}

inline Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::OursAdaptive, Strategy::OursConstant, Strategy::AugCL,
                       Strategy::StateCL, Strategy::Autoencoder})
        if (name == strategy_name(s)) return s;
    throw std::invalid_argument("strategy_from_name: unknown strategy " + name);
}

// Pose-adaptive temperature: L1 position distance times the normalized
// quaternion geodesic angle, floored at tau_min. The floor bounds the
// exponent in the SNN loss; the raw product is zero for identical poses and
// for pure translations or pure rotations.
inline double adaptive_tau(const Pose& x1, const Pose& x2, double tau_min) {
    if (tau_min <= 0.0) throw std::invalid_argument("adaptive_tau: tau_min must be positive");
    const double raw = l1_dist(x1.p_norm, x2.p_norm) * (quat_angle(x1.q, x2.q) / kPi);
    return std::max(tau_min, raw);
}

struct ContrastiveBatch {
    ObservationSample anchor;
    std::vector<ObservationSample> positives;
    std::vector<ObservationSample> negatives;
    std::vector<double> temperatures;  // aligned with positives then negatives

    void validate(double tau_min) const {
        if (positives.empty() || negatives.empty())
            throw std::invalid_argument("ContrastiveBatch: empty positive or negative set");
        if (temperatures.size() != positives.size() + negatives.size())
            throw std::invalid_argument("ContrastiveBatch: temperature count mismatch");
        for (double t : temperatures)
            if (!(t >= tau_min))
                throw std::invalid_argument("ContrastiveBatch: temperature below tau_min");
    }
};

// Soft-nearest-neighbor loss on precomputed similarities:
//   L = -log( sum_{p in P} w_p / sum_{i in P u N} w_i ),  w_i = exp((sim_i - 1) / tau_i)
// The exponent is the similarity shortfall from a perfect match scaled by the
// pair's temperature, so a small temperature weighs any residual dissimilarity
// heavily. Minimizing the loss pulls positives together and pushes negatives
// apart; for a common temperature the shift cancels in the ratio. Exponents
// are stabilized by subtracting their maximum.
inline double snn_loss_from_sims(const std::vector<double>& sims,
                                 const std::vector<double>& temps, std::size_t n_pos,
                                 std::vector<double>* dloss_dsim = nullptr) {
    const std::size_t n = sims.size();
    if (temps.size() != n || n_pos == 0 || n_pos >= n)
        throw std::invalid_argument("snn_loss_from_sims: bad sizes");
    std::vector<double> z(n);
    double zmax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = (sims[i] - 1.0) / temps[i];
        zmax = std::max(zmax, z[i]);
    }
    double sum_pos = 0.0, sum_all = 0.0;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp(z[i] - zmax);
        sum_all += w[i];
        if (i < n_pos) sum_pos += w[i];
    }
    const double loss = std::log(sum_all) - std::log(sum_pos);
    if (!std::isfinite(loss)) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::fabs(z[i]) > std::fabs(z[worst])) worst = i;
        throw std::runtime_error("snn_loss: non-finite loss, dominant pair index " +
                                 std::to_string(worst) + " (exponent " + std::to_string(z[worst]) +
                                 ")");
    }
    if (dloss_dsim) {
        dloss_dsim->assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double d = w[i] / sum_all;
            if (i < n_pos) d -= w[i] / sum_pos;
            (*dloss_dsim)[i] = d / temps[i];
        }
    }
    return loss;
}

namespace detail {

struct SimGrad {
    double sim;
    std::vector<double> danchor;
    std::vector<double> dother;
};

// Cosine similarity with gradients w.r.t. both embeddings.
inline SimGrad cosine_with_grad(const std::vector<double>& a, const std::vector<double>& e) {
    const double na = l2_norm(a);
    const double ne = l2_norm(e);
    if (na <= 0.0 || ne <= 0.0)
        throw std::domain_error("snn_loss: zero-norm embedding");
    const double s = dot(a, e) / (na * ne);
    SimGrad g;
    g.sim = s;
    g.danchor.resize(a.size());
    g.dother.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        g.danchor[i] = e[i] / (na * ne) - s * a[i] / (na * na);
        g.dother[i] = a[i] / (na * ne) - s * e[i] / (ne * ne);
    }
    return g;
}

}  // namespace detail

inline double snn_loss(const ContrastiveBatch& batch, const Mlp& encoder) {
    const std::vector<double> a = encoder.forward(batch.anchor.obs);
    const std::size_t n_pos = batch.positives.size();
    const std::size_t n = n_pos + batch.negatives.size();
    std::vector<double> sims(n);
    const double na = l2_norm(a);
    if (na <= 0.0) throw std::domain_error("snn_loss: zero-norm anchor embedding");
    for (std::size_t i = 0; i < n; ++i) {
        const ObservationSample& s =
            i < n_pos ? batch.positives[i] : batch.negatives[i - n_pos];
        const std::vector<double> e = encoder.forward(s.obs);
        const double ne = l2_norm(e);
        if (ne <= 0.0) throw std::domain_error("snn_loss: zero-norm embedding");
        sims[i] = dot(a, e) / (na * ne);
    }
    return snn_loss_from_sims(sims, batch.temperatures, n_pos);
}

// Exact gradient of snn_loss w.r.t. all encoder parameters, accumulated into
// `grad`. Temperatures are constants of the computation graph. Returns the
// loss value.
inline double snn_loss_grad(const ContrastiveBatch& batch, const Mlp& encoder,
                            std::vector<double>& grad) {
    const std::size_t n_pos = batch.positives.size();
    const std::size_t n = n_pos + batch.negatives.size();

    Mlp::Cache anchor_cache;
    const std::vector<double> a = encoder.forward(batch.anchor.obs, &anchor_cache);

    std::vector<Mlp::Cache> caches(n);
    std::vector<std::vector<double>> embs(n);
    std::vector<detail::SimGrad> sim_grads(n);
    std::vector<double> sims(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ObservationSample& s =
            i < n_pos ? batch.positives[i] : batch.negatives[i - n_pos];
        embs[i] = encoder.forward(s.obs, &caches[i]);
        sim_grads[i] = detail::cosine_with_grad(a, embs[i]);
        sims[i] = sim_grads[i].sim;
    }

    std::vector<double> dloss_dsim;
    const double loss = snn_loss_from_sims(sims, batch.temperatures, n_pos, &dloss_dsim);

    std::vector<double> danchor(a.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dloss_dsim[i];
        for (std::size_t k = 0; k < a.size(); ++k) danchor[k] += d * sim_grads[i].danchor[k];
        std::vector<double> dother(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) dother[k] = d * sim_grads[i].dother[k];
        encoder.backprop(caches[i], dother, grad);
    }
    encoder.backprop(anchor_cache, danchor, grad);
    return loss;
}

struct PairStrategy {
    Strategy variant = Strategy::OursAdaptive;
    double pos_window_lo = 0.0;
    double pos_window_hi = 0.05;
    double neg_window_lo = 0.4;
    double neg_window_hi = 0.5;
    double aug_prob = 0.5;
    double aug_strength = 0.2;
    double tau_min = 0.05;
    double const_tau = 0.5;
    int n_positives = 12;
    int n_negatives = 24;
    int statecl_horizon = 12;

    void validate() const {
        auto in_range = [](double v) { return v >= 0.0 && v <= 0.5; };
        if (!in_range(pos_window_lo) || !in_range(pos_window_hi) || !in_range(neg_window_lo) ||
            !in_range(neg_window_hi))
            throw std::invalid_argument("PairStrategy: window bounds must be within [0, 0.5]");
        if (pos_window_hi >= neg_window_lo)
            throw std::invalid_argument("PairStrategy: positive and negative windows overlap");
        if (aug_prob < 0.0 || aug_prob > 1.0)
            throw std::invalid_argument("PairStrategy: augmentation probability out of range");
        if (n_positives < 1 || n_negatives < 1)
            throw std::invalid_argument("PairStrategy: need at least one positive and negative");
        if (tau_min <= 0.0) throw std::invalid_argument("PairStrategy: tau_min must be positive");
    }
};

// Draws anchors, window-constrained positives/negatives, and per-pair
// temperatures from a dataset. The progress index is sorted once at
// construction so window queries are binary searches.
class BatchSampler {
public:
    BatchSampler(const Dataset& dataset, const PairStrategy& strategy)
        : dataset_(&dataset), strategy_(strategy) {
        strategy.validate();
        if (dataset.samples.empty()) throw std::invalid_argument("BatchSampler: empty dataset");
        const bool needs_scenes = strategy.variant == Strategy::OursAdaptive ||
                                  strategy.variant == Strategy::OursConstant;
        if (needs_scenes && dataset.scene_ids().size() < 2)
            throw std::invalid_argument(
                "BatchSampler: ours strategies require a dataset spanning >= 2 scenes");

        order_.resize(dataset.samples.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        std::sort(order_.begin(), order_.end(), [&](std::size_t l, std::size_t r) {
            return dataset.samples[l].progress < dataset.samples[r].progress;
        });
        sorted_progress_.resize(order_.size());
        for (std::size_t i = 0; i < order_.size(); ++i)
            sorted_progress_[i] = dataset.samples[order_[i]].progress;

        if (strategy.variant == Strategy::StateCL) {
            for (const RolloutSpan& span : dataset.rollouts)
                for (std::size_t i = span.begin;
                     i + strategy.statecl_horizon < span.end; ++i)
                    statecl_anchors_.push_back(i);
            if (statecl_anchors_.empty())
                throw std::invalid_argument(
                    "BatchSampler: no rollout long enough for the StateCL horizon");
        }
    }

    ContrastiveBatch sample(Rng& rng) const {
        switch (strategy_.variant) {
            case Strategy::OursAdaptive:
            case Strategy::OursConstant: return sample_windowed(rng);
            case Strategy::AugCL: return sample_augcl(rng);
            case Strategy::StateCL: return sample_statecl(rng);
            case Strategy::Autoencoder:
                throw std::invalid_argument("BatchSampler: autoencoder has no pair sampling");
        }
        throw std::logic_error("BatchSampler: unreachable");
    }

private:
    ObservationSample maybe_augment(ObservationSample s, Rng& rng, bool force = false) const {
        if (force || (strategy_.aug_prob > 0.0 && rng.bernoulli(strategy_.aug_prob)))
            s.obs = augment(s.obs, strategy_.aug_strength, rng);
        return s;
    }

    // Indices (into the sorted order) of samples whose circular progress
    // distance to `anchor_progress` lies in [lo, hi].
    std::vector<std::pair<std::size_t, std::size_t>> window_ranges(double anchor_progress,
                                                                   double lo, double hi) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        auto add_interval = [&](double a, double b) {
            // raw progress interval [a, b], to be wrapped into [0, 1)
            double span = b - a;
            if (span <= 0.0) return;
            a -= std::floor(a);
            b = a + span;
            auto push = [&](double x, double y) {
                const auto first = std::lower_bound(sorted_progress_.begin(),
                                                    sorted_progress_.end(), x);
                const auto last = std::upper_bound(sorted_progress_.begin(),
                                                   sorted_progress_.end(), y);
                if (first < last)
                    out.emplace_back(first - sorted_progress_.begin(),
                                     last - sorted_progress_.begin());
            };
            if (b <= 1.0) {
                push(a, b);
            } else {
                push(a, 1.0);
                push(0.0, b - 1.0);
            }
        };
        add_interval(anchor_progress + lo, anchor_progress + hi);
        if (lo > 0.0)
            add_interval(anchor_progress - hi, anchor_progress - lo);
        else
            add_interval(anchor_progress - hi, anchor_progress);
        return out;
    }

    std::size_t draw_from_window(double anchor_progress, double lo, double hi,
                                 std::size_t exclude, Rng& rng, const char* label) const {
        const auto ranges = window_ranges(anchor_progress, lo, hi);
        std::size_t total = 0;
        for (const auto& r : ranges) total += r.second - r.first;
        if (total == 0 || (total == 1 && !ranges.empty() &&
                           order_[ranges.front().first] == exclude))
            throw std::runtime_error(std::string("sample_batch: empty ") + label +
                                     " window [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "] around progress " +
                                     std::to_string(anchor_progress));
        for (int attempt = 0; attempt < 256; ++attempt) {
            std::size_t k = rng.index(total);
            for (const auto& r : ranges) {
                const std::size_t len = r.second - r.first;
                if (k < len) {
                    const std::size_t idx = order_[r.first + k];
                    if (idx != exclude) return idx;
                    break;
                }
                k -= len;
            }
        }
        throw std::runtime_error(std::string("sample_batch: could not draw from ") + label +
                                 " window");
    }

    double pair_temperature(const Pose& anchor, const Pose& other) const {
        if (strategy_.variant == Strategy::OursAdaptive)
            return adaptive_tau(anchor, other, strategy_.tau_min);
        return strategy_.const_tau;
    }

    ContrastiveBatch sample_windowed(Rng& rng) const {
        const auto& samples = dataset_->samples;
        ContrastiveBatch batch;
        const std::size_t anchor_idx = rng.index(samples.size());
        batch.anchor = maybe_augment(samples[anchor_idx], rng);
        const double ap = samples[anchor_idx].progress;
        for (int p = 0; p < strategy_.n_positives; ++p) {
            const std::size_t idx = draw_from_window(ap, strategy_.pos_window_lo,
                                                     strategy_.pos_window_hi, anchor_idx, rng,
                                                     "positive");
            batch.positives.push_back(maybe_augment(samples[idx], rng));
            batch.temperatures.push_back(
                pair_temperature(batch.anchor.pose, samples[idx].pose));
        }
        for (int q = 0; q < strategy_.n_negatives; ++q) {
            const std::size_t idx = draw_from_window(ap, strategy_.neg_window_lo,
                                                     strategy_.neg_window_hi, anchor_idx, rng,
                                                     "negative");
            batch.negatives.push_back(maybe_augment(samples[idx], rng));
            batch.temperatures.push_back(
                pair_temperature(batch.anchor.pose, samples[idx].pose));
        }
        return batch;
    }

    ContrastiveBatch sample_augcl(Rng& rng) const {
        const auto& samples = dataset_->samples;
        ContrastiveBatch batch;
        const std::size_t anchor_idx = rng.index(samples.size());
        batch.anchor = maybe_augment(samples[anchor_idx], rng);
        for (int p = 0; p < strategy_.n_positives; ++p) {
            batch.positives.push_back(maybe_augment(samples[anchor_idx], rng, true));
            batch.temperatures.push_back(strategy_.const_tau);
        }
        for (int q = 0; q < strategy_.n_negatives; ++q) {
            std::size_t idx = anchor_idx;
            while (idx == anchor_idx) idx = rng.index(samples.size());
            batch.negatives.push_back(maybe_augment(samples[idx], rng));
            batch.temperatures.push_back(strategy_.const_tau);
        }
        return batch;
    }

    ContrastiveBatch sample_statecl(Rng& rng) const {
        const auto& samples = dataset_->samples;
        ContrastiveBatch batch;
        const std::size_t anchor_idx = statecl_anchors_[rng.index(statecl_anchors_.size())];
        batch.anchor = maybe_augment(samples[anchor_idx], rng);
        for (int p = 0; p < strategy_.n_positives; ++p) {
            const std::size_t idx =
                anchor_idx + 1 +
                static_cast<std::size_t>(p % strategy_.statecl_horizon);
            batch.positives.push_back(maybe_augment(samples[idx], rng));
            batch.temperatures.push_back(strategy_.const_tau);
        }
        for (int q = 0; q < strategy_.n_negatives; ++q) {
            std::size_t idx = anchor_idx;
            while (idx == anchor_idx) idx = rng.index(samples.size());
            batch.negatives.push_back(maybe_augment(samples[idx], rng));
            batch.temperatures.push_back(strategy_.const_tau);
        }
        return batch;
    }

    const Dataset* dataset_;
    PairStrategy strategy_;
    std::vector<std::size_t> order_;
    std::vector<double> sorted_progress_;
    std::vector<std::size_t> statecl_anchors_;
};

inline ContrastiveBatch sample_batch(const Dataset& dataset, const PairStrategy& strategy,
                                     Rng& rng) {
    return BatchSampler(dataset, strategy).sample(rng);
}

struct Encoder {
    Mlp net;
    Strategy strategy = Strategy::OursAdaptive;
    std::string config_hash;
    std::uint64_t seed = 0;

    std::vector<double> embed(const std::vector<double>& obs) const {
        return net.forward(obs);
    }
    int embedding_dim() const { return net.output_dim(); }
};

struct EncoderTrainConfig {
    std::vector<int> hidden = {128, 128};
    int embedding_dim = 32;
    int steps = 1000;
    int anchors_per_step = 8;
    double lr_start = 1e-3;
    double lr_end = 1e-5;
    int autoencoder_batch = 64;
    std::uint64_t seed = 1;
    std::string config_hash;
};

struct TrainLogRow {
    int step = 0;
    double loss = 0.0;
    double lr = 0.0;
};

struct EncoderTrainResult {
    Encoder encoder;
    std::vector<TrainLogRow> log;
};

inline std::vector<int> encoder_widths(const EncoderTrainConfig& cfg, int input_dim) {
    std::vector<int> widths{input_dim};
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(cfg.embedding_dim);
    return widths;
}

// Adam on the SNN objective over sampled batches, learning rate linearly
// decayed from lr_start. Deterministic given the seed.
inline EncoderTrainResult train_encoder(const Dataset& dataset, const PairStrategy& strategy,
                                        const EncoderTrainConfig& cfg) {
    if (dataset.samples.empty()) throw std::invalid_argument("train_encoder: empty dataset");
    Rng init_rng = Rng(cfg.seed).split("encoder-init");
    Mlp net = Mlp::xavier_init(encoder_widths(cfg, kObservationDim), init_rng);

    EncoderTrainResult result;
    result.encoder = Encoder{net, strategy.variant, cfg.config_hash, cfg.seed};
    if (cfg.steps == 0) return result;

    BatchSampler sampler(dataset, strategy);
    Adam adam(net.param_count());
    const LinearLrSchedule sched{cfg.lr_start, cfg.lr_end,
                                 static_cast<std::size_t>(cfg.steps)};
    Rng sample_rng = Rng(cfg.seed).split("encoder-batches");
    std::vector<double> grad(net.param_count());

    for (int step = 0; step < cfg.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (int a = 0; a < cfg.anchors_per_step; ++a)
            loss += snn_loss_grad(sampler.sample(sample_rng), net, grad);
        loss /= cfg.anchors_per_step;
        for (auto& g : grad) g /= cfg.anchors_per_step;
        if (!std::isfinite(loss))
            throw std::runtime_error("train_encoder: loss diverged at step " +
                                     std::to_string(step) + "; last finite checkpoint is step " +
                                     std::to_string(step - 1));
        const double lr = sched.at(static_cast<std::size_t>(step));
        adam.step(net.params(), grad, lr);
        result.log.push_back({step, loss, lr});
    }
    result.encoder.net = std::move(net);
    return result;
}

// Reconstruction baseline: encoder plus mirrored decoder under element-mean
// MSE; the returned artifact is the encoder half.
inline EncoderTrainResult train_autoencoder(const Dataset& dataset,
                                            const EncoderTrainConfig& cfg) {
    if (dataset.samples.empty()) throw std::invalid_argument("train_autoencoder: empty dataset");
    Rng init_rng = Rng(cfg.seed).split("autoencoder-init");
    Mlp enc = Mlp::xavier_init(encoder_widths(cfg, kObservationDim), init_rng);
    std::vector<int> dec_widths(encoder_widths(cfg, kObservationDim));
    std::reverse(dec_widths.begin(), dec_widths.end());
    Mlp dec = Mlp::xavier_init(dec_widths, init_rng);

    EncoderTrainResult result;
    result.encoder = Encoder{enc, Strategy::Autoencoder, cfg.config_hash, cfg.seed};
    if (cfg.steps == 0) return result;

    Adam adam_enc(enc.param_count());
    Adam adam_dec(dec.param_count());
    const LinearLrSchedule sched{cfg.lr_start, cfg.lr_end,
                                 static_cast<std::size_t>(cfg.steps)};
    Rng sample_rng = Rng(cfg.seed).split("autoencoder-batches");
    std::vector<double> genc(enc.param_count()), gdec(dec.param_count());

    const double denom = static_cast<double>(cfg.autoencoder_batch) * kObservationDim;
    for (int step = 0; step < cfg.steps; ++step) {
        std::fill(genc.begin(), genc.end(), 0.0);
        std::fill(gdec.begin(), gdec.end(), 0.0);
        double loss = 0.0;
        for (int b = 0; b < cfg.autoencoder_batch; ++b) {
            const auto& x = dataset.samples[sample_rng.index(dataset.samples.size())].obs;
            Mlp::Cache ec, dc;
            const std::vector<double> code = enc.forward(x, &ec);
            const std::vector<double> recon = dec.forward(code, &dc);
            std::vector<double> drecon(recon.size());
            for (std::size_t i = 0; i < recon.size(); ++i) {
                const double err = recon[i] - x[i];
                loss += err * err / denom;
                drecon[i] = 2.0 * err / denom;
            }
            const std::vector<double> dcode = dec.backprop(dc, drecon, gdec);
            enc.backprop(ec, dcode, genc);
        }
        if (!std::isfinite(loss))
            throw std::runtime_error("train_autoencoder: loss diverged at step " +
                                     std::to_string(step));
        const double lr = sched.at(static_cast<std::size_t>(step));
        adam_enc.step(enc.params(), genc, lr);
        adam_dec.step(dec.params(), gdec, lr);
        result.log.push_back({step, loss, lr});
    }
    result.encoder.net = std::move(enc);
    return result;
}

inline nlohmann::json encoder_to_json(const Encoder& e) {
    return nlohmann::json{{"type", "encoder"},
                          {"widths", e.net.widths()},
                          {"activation", "tanh"},
                          {"strategy", strategy_name(e.strategy)},
                          {"config_hash", e.config_hash},
                          {"seed", e.seed},
                          {"weights", e.net.params()}};
}

inline Encoder encoder_from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "encoder")
        throw std::runtime_error("encoder_from_json: not an encoder checkpoint");
    Encoder e;
    e.net = Mlp(j.at("widths").get<std::vector<int>>());
    e.net.params() = j.at("weights").get<std::vector<double>>();
    if (e.net.params().size() != Mlp(j.at("widths").get<std::vector<int>>()).param_count())
        throw std::runtime_error("encoder_from_json: weight count mismatch");
    e.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    e.config_hash = j.at("config_hash").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    return e;
}

inline void save_encoder(const Encoder& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_encoder: cannot open " + path);
    out << encoder_to_json(e).dump();
    if (!out) throw std::runtime_error("save_encoder: write failed for " + path);
}

inline Encoder load_encoder(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_encoder: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return encoder_from_json(j);
}

}  // namespace scenic
