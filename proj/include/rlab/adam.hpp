#pragma once

#include <cmath>
#include <vector>

#include "rlab/tensor.hpp"

namespace rlab {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// First/second moment accumulators shaped exactly like the parameter list.
class AdamState {
 public:
  AdamState(const AdamConfig& cfg, const std::vector<Tensor<double>>& params)
      : cfg_(cfg) {
    for (const auto& p : params) {
      m_.emplace_back(p.rows, p.cols);
      v_.emplace_back(p.rows, p.cols);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

  friend void adam_step(AdamState& state, std::vector<Tensor<double>>& params,
                        const std::vector<Tensor<double>>& grads);

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Tensor<double>> m_, v_;
};

// Standard bias-corrected Adam update, in place.
inline void adam_step(AdamState& state, std::vector<Tensor<double>>& params,
                      const std::vector<Tensor<double>>& grads) {
  if (params.size() != state.m_.size() || grads.size() != params.size())
    throw ShapeMismatch("Adam state/parameter/gradient lists disagree");
  state.t_ += 1;
  const auto& cfg = state.cfg_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    if (!p.same_shape(g) || !p.same_shape(state.m_[i]))
      throw ShapeMismatch("Adam tensor shapes disagree");
    auto& m = state.m_[i];
    auto& v = state.v_[i];
    for (std::size_t j = 0; j < p.data.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

}  // namespace rlab
