#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenic/math.hpp"
#include "scenic/rng.hpp"

namespace scenic {

// Fully connected network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector (per-layer weight blocks then biases)
// so optimizers and finite-difference checks can treat the model as a plain
// parameter vector.
class Mlp {
public:
    Mlp() = default;

    explicit Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
        if (widths_.size() < 2) throw std::invalid_argument("Mlp: need at least two widths");
        std::size_t total = 0;
        for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
            weight_offsets_.push_back(total);
            total += static_cast<std::size_t>(widths_[l]) * widths_[l + 1];
            bias_offsets_.push_back(total);
            total += widths_[l + 1];
        }
        params_.assign(total, 0.0);
    }

    static Mlp xavier_init(std::vector<int> widths, Rng& rng) {
        Mlp net(std::move(widths));
        for (std::size_t l = 0; l + 1 < net.widths_.size(); ++l) {
            const int fan_in = net.widths_[l];
            const int fan_out = net.widths_[l + 1];
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            double* w = net.params_.data() + net.weight_offsets_[l];
            for (int i = 0; i < fan_in * fan_out; ++i) w[i] = rng.uniform(-bound, bound);
        }
        return net;
    }

    const std::vector<int>& widths() const { return widths_; }
    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }
    std::size_t layer_count() const { return widths_.size() - 1; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    struct Cache {
        std::vector<std::vector<double>> activations;  // per layer, input first
        std::vector<std::vector<double>> pre;          // pre-activations per layer
    };

    std::vector<double> forward(const std::vector<double>& x, Cache* cache = nullptr) const {
        if (static_cast<int>(x.size()) != widths_.front())
            throw std::invalid_argument("Mlp::forward: input size mismatch");
        std::vector<double> cur = x;
        if (cache) {
            cache->activations.clear();
            cache->pre.clear();
            cache->activations.push_back(cur);
        }
        for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
            const int in = widths_[l];
            const int out = widths_[l + 1];
            const double* w = params_.data() + weight_offsets_[l];
            const double* b = params_.data() + bias_offsets_[l];
            std::vector<double> next(out);
            for (int o = 0; o < out; ++o) {
                double acc = b[o];
                const double* row = w + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
                next[o] = acc;
            }
            if (cache) cache->pre.push_back(next);
            const bool last = (l + 2 == widths_.size());
            if (!last)
                for (auto& v : next) v = std::tanh(v);
            cur = std::move(next);
            if (cache) cache->activations.push_back(cur);
        }
        return cur;
    }

    // Accumulates parameter gradients into `grad` (same layout as params)
    // and returns the gradient with respect to the input.
    std::vector<double> backprop(const Cache& cache, const std::vector<double>& dloss_dout,
                                 std::vector<double>& grad) const {
        if (grad.size() != params_.size())
            throw std::invalid_argument("Mlp::backprop: grad size mismatch");
        std::vector<double> delta = dloss_dout;
        for (std::size_t l = widths_.size() - 1; l-- > 0;) {
            const int in = widths_[l];
            const int out = widths_[l + 1];
            const bool last = (l + 2 == widths_.size());
            if (!last) {
                // tanh'(u) = 1 - tanh(u)^2; activations already hold tanh(u).
                const std::vector<double>& a = cache.activations[l + 1];
                for (int o = 0; o < out; ++o) delta[o] *= 1.0 - a[o] * a[o];
            }
            double* gw = grad.data() + weight_offsets_[l];
            double* gb = grad.data() + bias_offsets_[l];
            const std::vector<double>& x = cache.activations[l];
            for (int o = 0; o < out; ++o) {
                gb[o] += delta[o];
                double* row = gw + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) row[i] += delta[o] * x[i];
            }
            std::vector<double> prev(in, 0.0);
            const double* w = params_.data() + weight_offsets_[l];
            for (int o = 0; o < out; ++o) {
                const double* row = w + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
            }
            delta = std::move(prev);
        }
        return delta;
    }

    // Scales the output layer (weights and bias) by a constant.
    void scale_output_layer(double c) {
        const std::size_t l = widths_.size() - 2;
        const std::size_t n =
            static_cast<std::size_t>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
        double* w = params_.data() + weight_offsets_[l];
        for (std::size_t i = 0; i < n; ++i) w[i] *= c;
    }

private:
    std::vector<int> widths_;
    std::vector<std::size_t> weight_offsets_;
    std::vector<std::size_t> bias_offsets_;
    std::vector<double> params_;
};

}  // namespace scenic
