#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace scenic {

// Linear interpolation from lr_start to lr_end over `steps` calls, constant
// afterwards.
struct LinearLrSchedule {
    double lr_start = 1e-4;
    double lr_end = 0.0;
    std::size_t steps = 1;

    double at(std::size_t step) const {
        if (steps <= 1) return lr_end;
        const double t = static_cast<double>(step) / static_cast<double>(steps - 1);
        return t >= 1.0 ? lr_end : lr_start + (lr_end - lr_start) * t;
    }
};

class Adam {
public:
    explicit Adam(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
        if (params.size() != m_.size() || grad.size() != m_.size())
            throw std::invalid_argument("Adam::step: size mismatch");
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
            const double mhat = m_[i] / bc1;
            const double vhat = v_[i] / bc2;
            params[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
        }
    }

    std::size_t step_count() const { return t_; }

private:
    double beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace scenic
