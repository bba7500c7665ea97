#pragma once

#include <cmath>

#include "symmimic/net/mlp.hpp"

namespace symmimic {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Diagonal Gaussian with an MLP mean and a state-independent log-std.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(const MlpSpec& spec, double init_log_std = 0.0)
      : mean_(spec), log_std_(VecX::Constant(spec.output, init_log_std)) {
    clamp_log_std();
  }

  int obs_dim() const { return mean_.input_dim(); }
  int action_dim() const { return mean_.output_dim(); }
  const Mlp& mean_net() const { return mean_; }
  Mlp& mean_net() { return mean_; }
  const VecX& log_std() const { return log_std_; }
  void set_log_std(const VecX& v) {
    if (v.size() != log_std_.size()) throw ValidationError("log-std length mismatch");
    log_std_ = v;
    clamp_log_std();
  }
  VecX std() const { return log_std_.array().exp().matrix(); }

  /// Flat parameters: mean network, then log-std.
  int num_params() const { return mean_.num_params() + action_dim(); }
  VecX params() const {
    VecX p(num_params());
    p << mean_.params(), log_std_;
    return p;
  }
  void set_params(const VecX& p) {
    if (p.size() != num_params()) throw ValidationError("policy parameter count mismatch");
    mean_.set_params(p.head(mean_.num_params()));
    set_log_std(p.tail(action_dim()));
  }

  MatX mean(const MatX& obs, MlpCache* cache = nullptr) const { return mean_.forward(obs, cache); }

  /// Per-column log density of `actions` under N(mu, diag(std^2)).
  VecX log_prob(const MatX& mu, const MatX& actions) const {
    const VecX inv_var = (-2.0 * log_std_).array().exp().matrix();
    const double norm = log_std_.sum() + 0.5 * action_dim() * std::log(2.0 * kPi);
    VecX out(mu.cols());
    for (int c = 0; c < mu.cols(); ++c) {
      const VecX d = actions.col(c) - mu.col(c);
      out[c] = -0.5 * d.cwiseProduct(d).dot(inv_var) - norm;
    }
    return out;
  }

  double entropy() const { return log_std_.sum() + 0.5 * action_dim() * (1.0 + std::log(2.0 * kPi)); }

  VecX sample(const VecX& mu, Rng& rng) const {
    VecX a(mu.size());
    for (int i = 0; i < mu.size(); ++i) a[i] = mu[i] + std::exp(log_std_[i]) * rng.normal(0.0, 1.0);
    return a;
  }

  /// Gradients of sum_c w_c * log_prob_c with respect to the mean (per column)
  /// and log-std, for weights `w` (one per column).
  void log_prob_grad(const MatX& mu, const MatX& actions, const VecX& w, MatX& d_mu, VecX& d_log_std) const {
    const VecX inv_var = (-2.0 * log_std_).array().exp().matrix();
    d_mu.resize(mu.rows(), mu.cols());
    d_log_std = VecX::Zero(action_dim());
    for (int c = 0; c < mu.cols(); ++c) {
      const VecX d = actions.col(c) - mu.col(c);
      d_mu.col(c) = w[c] * d.cwiseProduct(inv_var);
      d_log_std += w[c] * (d.cwiseProduct(d).cwiseProduct(inv_var) - VecX::Ones(action_dim()));
    }
  }

  void clamp_log_std() {
    if (!log_std_.allFinite()) throw InstabilityError("policy log-std is not finite");
    log_std_ = log_std_.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  }

 private:
  Mlp mean_;
  VecX log_std_;
};

/// Mean KL(old || new) between diagonal Gaussians, averaged over columns.
inline double gaussian_kl(const MatX& mu_old, const VecX& log_std_old, const MatX& mu_new, const VecX& log_std_new) {
  const VecX var_old = (2.0 * log_std_old).array().exp().matrix();
  const VecX inv_var_new = (-2.0 * log_std_new).array().exp().matrix();
  const double const_part = (log_std_new - log_std_old).sum() + 0.5 * var_old.dot(inv_var_new) -
                            0.5 * static_cast<double>(log_std_old.size());
  double acc = 0.0;
  for (int c = 0; c < mu_old.cols(); ++c) {
    const VecX d = mu_new.col(c) - mu_old.col(c);
    acc += 0.5 * d.cwiseProduct(d).dot(inv_var_new);
  }
  return const_part + acc / std::max<Eigen::Index>(1, mu_old.cols());
}

}  // namespace symmimic
