#pragma once

#include <cmath>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"

namespace symmimic {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(int num_params, AdamConfig config = {})
      : config_(config), m_(VecX::Zero(num_params)), v_(VecX::Zero(num_params)) {}

  const AdamConfig& config() const { return config_; }
  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  long long steps() const { return t_; }

  /// params -= lr * mhat / (sqrt(vhat) + eps), with bias-corrected moments.
  void step(VecX& params, const VecX& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw ValidationError("Adam: shape mismatch");
    if (!grad.allFinite()) throw InstabilityError("non-finite gradient");
    ++t_;
    m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
    v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    params.array() -= config_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.epsilon);
  }

  Json to_json() const {
    return {{"lr", config_.lr}, {"beta1", config_.beta1}, {"beta2", config_.beta2}, {"epsilon", config_.epsilon},
            {"t", t_},          {"m", vec_to_json(m_)},   {"v", vec_to_json(v_)}};
  }
  static Adam from_json(const Json& j) {
    Adam a;
    a.config_.lr = j.at("lr").get<double>();
    a.config_.beta1 = j.at("beta1").get<double>();
    a.config_.beta2 = j.at("beta2").get<double>();
    a.config_.epsilon = j.at("epsilon").get<double>();
    a.t_ = j.at("t").get<long long>();
    a.m_ = vec_from_json(j.at("m"));
    a.v_ = vec_from_json(j.at("v"));
    return a;
  }

 private:
  AdamConfig config_;
  VecX m_, v_;
  long long t_ = 0;
};

/// Scales `g` in place so its norm is at most `max_norm`; returns the
/// original norm.
inline double clip_grad_norm(Eigen::Ref<VecX> g, double max_norm) {
  const double n = g.norm();
  if (max_norm > 0.0 && n > max_norm) g *= max_norm / (n + 1e-6);
  return n;
}

}  // namespace symmimic
