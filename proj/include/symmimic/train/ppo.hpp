#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "symmimic/env/observation.hpp"
#include "symmimic/net/adam.hpp"
#include "symmimic/net/normalizer.hpp"
#include "symmimic/net/policy.hpp"
#include "symmimic/train/config.hpp"

namespace symmimic {

struct GaeResult {
  VecX advantages;
  VecX returns;
};

/// GAE over one environment's steps. dones[t] marks the last step of an
/// episode: no value is bootstrapped across it.
inline GaeResult compute_gae(const VecX& rewards, const VecX& values, const std::vector<bool>& dones,
                             double last_value, double gamma, double lambda) {
  const int T = static_cast<int>(rewards.size());
  if (values.size() != T || static_cast<int>(dones.size()) != T) throw ValidationError("GAE: length mismatch");
  GaeResult out{VecX(T), VecX(T)};
  double gae = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    const double next_value = t + 1 < T ? values[t + 1] : last_value;
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    gae = delta + gamma * lambda * live * gae;
    out.advantages[t] = gae;
  }
  out.returns = out.advantages + values;
  return out;
}

/// Shifts and scales to zero mean and unit (population) std.
inline void normalize_advantages(VecX& a) {
  if (a.size() == 0) return;
  const double mean = a.mean();
  const double std = std::sqrt((a.array() - mean).square().mean());
  a = (a.array() - mean) / (std + 1e-8);
}

struct SurrogateResult {
  double loss = 0.0;
  double clip_fraction = 0.0;
  VecX grad_log_prob;  // d loss / d log_prob, per sample
};

/// -mean(min(r A, clip(r, 1-eps, 1+eps) A)) with r = exp(log_prob - old_log_prob).
inline SurrogateResult clipped_surrogate(const VecX& log_prob, const VecX& old_log_prob, const VecX& adv,
                                         double clip) {
  const int B = static_cast<int>(log_prob.size());
  if (old_log_prob.size() != B || adv.size() != B) throw ValidationError("surrogate: length mismatch");
  SurrogateResult s;
  s.grad_log_prob = VecX::Zero(B);
  double acc = 0.0;
  int clipped = 0;
  for (int i = 0; i < B; ++i) {
    const double r = std::exp(log_prob[i] - old_log_prob[i]);
    const double unclipped = r * adv[i];
    const double bounded = std::clamp(r, 1.0 - clip, 1.0 + clip) * adv[i];
    if (unclipped <= bounded) {
      acc += unclipped;
      s.grad_log_prob[i] = -unclipped / B;
    } else {
      acc += bounded;
    }
    if (std::abs(r - 1.0) > clip) ++clipped;
  }
  s.loss = -acc / B;
  s.clip_fraction = static_cast<double>(clipped) / std::max(1, B);
  return s;
}

/// Adaptive step size: divide by 1.5 when the KL exceeds twice the target,
/// multiply by 1.5 when it is below half, clamped to [lr_min, lr_max].
inline double adapt_lr(double lr, double kl, const PpoConfig& c) {
  if (kl > 2.0 * c.desired_kl) return std::max(c.lr_min, lr / 1.5);
  if (kl < 0.5 * c.desired_kl && kl > 0.0) return std::min(c.lr_max, lr * 1.5);
  return lr;
}

/// Samples used by one PPO update; one sample per column, raw observations.
struct PpoBatch {
  MatX obs;
  MatX critic_obs;
  MatX actions;
  VecX old_log_prob;
  MatX old_mean;
  VecX old_log_std;
  VecX advantages;  // normalized
  VecX returns;

  int size() const { return static_cast<int>(actions.cols()); }
};

/// Mirror maps for the symmetry objective.
struct MirrorMaps {
  SignedPermutation obs;
  SignedPermutation action;
};

struct UpdateStats {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double symmetry_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  double total_loss = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  int minibatches = 0;

  Json to_json() const {
    return {{"surrogate", surrogate},   {"value_loss", value_loss}, {"symmetry_loss", symmetry_loss},
            {"entropy", entropy},       {"kl", kl},                 {"clip_fraction", clip_fraction},
            {"total_loss", total_loss}, {"grad_norm", grad_norm},   {"lr", lr}};
  }
};

/// Per-minibatch losses, without side effects.
struct MinibatchLoss {
  SurrogateResult ppo;
  std::optional<SurrogateResult> symmetry;
  VecX symmetry_log_prob;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

/// Actor-critic with the PPO objective plus the mirrored-ratio surrogate.
class PpoLearner {
 public:
  PpoLearner(int obs_dim, int critic_dim, int action_dim, const PpoConfig& config,
             std::optional<MirrorMaps> mirrors = std::nullopt)
      : config_(config), mirrors_(std::move(mirrors)), shuffle_rng_(mix_seed(config.seed, 4)) {
    validate(config);
    actor = GaussianPolicy(MlpSpec{obs_dim, config.actor_hidden, action_dim, config.activation,
                                   mix_seed(config.seed, 1), 0.01},
                           config.init_log_std);
    critic = Mlp(MlpSpec{critic_dim, config.critic_hidden, 1, config.activation, mix_seed(config.seed, 2), 1.0});
    actor_norm = RunningNorm(obs_dim);
    critic_norm = RunningNorm(critic_dim);
    optimizer = Adam(actor.num_params() + critic.num_params(), AdamConfig{config.learning_rate});
    if (mirrors_ && (mirrors_->obs.size() != obs_dim || mirrors_->action.size() != action_dim))
      throw ValidationError("mirror maps do not match the observation/action sizes");
  }

  GaussianPolicy actor;
  Mlp critic;
  RunningNorm actor_norm;
  RunningNorm critic_norm;
  Adam optimizer;

  const PpoConfig& config() const { return config_; }
  const std::optional<MirrorMaps>& mirrors() const { return mirrors_; }
  Rng& shuffle_rng() { return shuffle_rng_; }

  VecX params() const {
    VecX p(actor.num_params() + critic.num_params());
    p << actor.params(), critic.params();
    return p;
  }
  void set_params(const VecX& p) {
    actor.set_params(p.head(actor.num_params()));
    critic.set_params(p.tail(critic.num_params()));
  }

  VecX values(const MatX& critic_obs) const { return critic.forward(critic_norm.normalize(critic_obs)).row(0).transpose(); }

  /// Folds observations (and their mirrors, when the normalizer is symmetric)
  /// into the running statistics.
  void update_normalizers(const MatX& obs, const MatX& critic_obs) {
    actor_norm.update(obs);
    critic_norm.update(critic_obs);
    if (mirrors_ && config_.symmetric_normalizer) {
      actor_norm.update(mirrors_->obs.apply_rows(obs));
      if (critic_obs.rows() == obs.rows()) critic_norm.update(mirrors_->obs.apply_rows(critic_obs));
    }
  }

  /// Losses and their gradient (flat, same order as params()).
  MinibatchLoss loss_and_grad(const PpoBatch& b, VecX* grad) const {
    MinibatchLoss L;
    const int B = b.size();
    MlpCache cache;
    const MatX mu = actor.mean(actor_norm.normalize(b.obs), &cache);
    const VecX logp = actor.log_prob(mu, b.actions);
    L.kl = gaussian_kl(b.old_mean, b.old_log_std, mu, actor.log_std());
    L.ppo = clipped_surrogate(logp, b.old_log_prob, b.advantages, config_.clip);
    L.entropy = actor.entropy();

    MlpCache vcache;
    const MatX v = critic.forward(critic_norm.normalize(b.critic_obs), &vcache);
    const VecX verr = v.row(0).transpose() - b.returns;
    L.value_loss = verr.squaredNorm() / B;

    const double lam = config_.symmetry_coef;
    L.total = L.ppo.loss + config_.value_coef * L.value_loss - config_.entropy_coef * L.entropy;

    MatX dmu;
    VecX dls;
    if (grad) actor.log_prob_grad(mu, b.actions, L.ppo.grad_log_prob, dmu, dls);
    VecX g_mean = grad ? actor.mean_net().backward(cache, dmu) : VecX();

    if (mirrors_ && lam > 0.0) {
      MlpCache mcache;
      const MatX mobs = mirrors_->obs.apply_rows(b.obs);
      const MatX mact = mirrors_->action.apply_rows(b.actions);
      const MatX mmu = actor.mean(actor_norm.normalize(mobs), &mcache);
      L.symmetry_log_prob = actor.log_prob(mmu, mact);
      // The ratio compares the mirrored density against the old density of
      // the original sample, with the original advantage.
      L.symmetry = clipped_surrogate(L.symmetry_log_prob, b.old_log_prob, b.advantages, config_.clip);
      L.total += lam * L.symmetry->loss;
      if (grad) {
        MatX dmu_s;
        VecX dls_s;
        actor.log_prob_grad(mmu, mact, L.symmetry->grad_log_prob, dmu_s, dls_s);
        g_mean += lam * actor.mean_net().backward(mcache, dmu_s);
        dls += lam * dls_s;
      }
    }
    if (grad) {
      dls.array() -= config_.entropy_coef;
      const VecX g_critic = critic.backward(vcache, (2.0 * config_.value_coef / B) * verr.transpose());
      grad->resize(actor.num_params() + critic.num_params());
      *grad << g_mean, dls, g_critic;
    }
    return L;
  }

  /// Epochs of shuffled minibatch steps over `batch`.
  UpdateStats update(const PpoBatch& batch) {
    const int N = batch.size();
    const int mb = config_.minibatch_size > 0 ? config_.minibatch_size : N / 4;
    if (mb < 1 || N % mb != 0) throw ConfigError("minibatch size must divide the batch");
    UpdateStats st;
    std::vector<int> order(N);
    for (int e = 0; e < config_.learning_epochs; ++e) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), shuffle_rng_.engine());
      for (int start = 0; start < N; start += mb) {
        const std::vector<int> idx(order.begin() + start, order.begin() + start + mb);
        const PpoBatch b = slice(batch, idx);
        VecX grad;
        const MinibatchLoss L = loss_and_grad(b, &grad);
        if (config_.schedule == "adaptive") optimizer.set_lr(adapt_lr(optimizer.lr(), L.kl, config_));
        st.grad_norm += clip_grad_norm(grad, config_.max_grad_norm);
        VecX p = params();
        optimizer.step(p, grad);
        set_params(p);
        st.surrogate += L.ppo.loss;
        st.value_loss += L.value_loss;
        st.symmetry_loss += L.symmetry ? L.symmetry->loss : 0.0;
        st.entropy += L.entropy;
        st.kl += L.kl;
        st.clip_fraction += L.ppo.clip_fraction;
        st.total_loss += L.total;
        ++st.minibatches;
      }
    }
    const double n = std::max(1, st.minibatches);
    st.surrogate /= n;
    st.value_loss /= n;
    st.symmetry_loss /= n;
    st.entropy /= n;
    st.kl /= n;
    st.clip_fraction /= n;
    st.total_loss /= n;
    st.grad_norm /= n;
    st.lr = optimizer.lr();
    return st;
  }

  static PpoBatch slice(const PpoBatch& b, const std::vector<int>& idx) {
    PpoBatch s;
    const int n = static_cast<int>(idx.size());
    s.obs.resize(b.obs.rows(), n);
    s.critic_obs.resize(b.critic_obs.rows(), n);
    s.actions.resize(b.actions.rows(), n);
    s.old_mean.resize(b.old_mean.rows(), n);
    s.old_log_prob.resize(n);
    s.advantages.resize(n);
    s.returns.resize(n);
    for (int i = 0; i < n; ++i) {
      const int k = idx[i];
      s.obs.col(i) = b.obs.col(k);
      s.critic_obs.col(i) = b.critic_obs.col(k);
      s.actions.col(i) = b.actions.col(k);
      s.old_mean.col(i) = b.old_mean.col(k);
      s.old_log_prob[i] = b.old_log_prob[k];
      s.advantages[i] = b.advantages[k];
      s.returns[i] = b.returns[k];
    }
    s.old_log_std = b.old_log_std;
    return s;
  }

  Json save() const {
    return {{"params", vec_to_json(params())},         {"actor_norm", actor_norm.to_json()},
            {"critic_norm", critic_norm.to_json()},    {"optimizer", optimizer.to_json()},
            {"shuffle_rng", shuffle_rng_.serialize()}};
  }
  void load(const Json& j) {
    set_params(vec_from_json(j.at("params")));
    actor_norm = RunningNorm::from_json(j.at("actor_norm"));
    critic_norm = RunningNorm::from_json(j.at("critic_norm"));
    optimizer = Adam::from_json(j.at("optimizer"));
    shuffle_rng_.deserialize(j.at("shuffle_rng").get<std::string>());
  }

 private:
  PpoConfig config_;
  std::optional<MirrorMaps> mirrors_;
  Rng shuffle_rng_;
};

/// E || T_a(mu(s)) - mu(T_s(s)) || over the columns of `obs` (raw).
inline double asymmetry(const GaussianPolicy& actor, const RunningNorm& norm, const MirrorMaps& maps,
                        const MatX& obs) {
  const MatX a = maps.action.apply_rows(actor.mean(norm.normalize(obs)));
  const MatX b = actor.mean(norm.normalize(maps.obs.apply_rows(obs)));
  return (a - b).colwise().norm().mean();
}

}  // namespace symmimic
