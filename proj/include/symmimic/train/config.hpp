#pragma once

#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"

namespace symmimic {

struct PpoConfig {
  int num_envs = 64;
  int steps_per_env = 24;
  int learning_epochs = 5;
  int minibatch_size = 0;  // 0: a quarter of the batch
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.005;
  double value_coef = 1.0;
  double desired_kl = 0.01;
  double learning_rate = 1e-3;
  std::string schedule = "adaptive";  // adaptive | fixed
  double lr_min = 1e-5;
  double lr_max = 1e-2;
  double symmetry_coef = 0.5;
  double max_grad_norm = 1.0;
  long long total_samples = 2'000'000;
  std::vector<int> actor_hidden = {256, 128, 64};
  std::vector<int> critic_hidden = {256, 128, 64};
  std::string activation = "elu";
  double init_log_std = 0.0;
  double reward_scale = 0.002;  // per-step rewards are multiplied by this before GAE
  bool symmetric_normalizer = true;
  int checkpoint_interval = 50;  // iterations; 0 disables intermediate checkpoints
  int probe_interval = 0;        // iterations between held-out SR probes; 0 disables
  int probe_rollouts = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: default_thread_count()

  int batch_size() const { return num_envs * steps_per_env; }
  int minibatch() const { return minibatch_size > 0 ? minibatch_size : batch_size() / 4; }
};

inline void validate(const PpoConfig& c) {
  if (c.num_envs < 1 || c.steps_per_env < 1) throw ConfigError("ppo.num_envs and ppo.steps_per_env must be >= 1");
  if (c.learning_epochs < 1) throw ConfigError("ppo.learning_epochs must be >= 1");
  if (c.minibatch() < 1 || c.batch_size() % c.minibatch() != 0)
    throw ConfigError("ppo.minibatch_size must divide num_envs * steps_per_env");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("ppo.gamma must be in (0, 1]");
  if (!(c.lambda > 0.0 && c.lambda <= 1.0)) throw ConfigError("ppo.lambda must be in (0, 1]");
  if (!(c.clip > 0.0)) throw ConfigError("ppo.clip must be positive");
  if (c.entropy_coef < 0.0 || c.value_coef < 0.0 || c.symmetry_coef < 0.0)
    throw ConfigError("ppo loss coefficients must be >= 0");
  if (!(c.learning_rate > 0.0) || !(c.lr_min > 0.0) || c.lr_min > c.lr_max)
    throw ConfigError("ppo learning rates must be positive with lr_min <= lr_max");
  if (c.schedule != "adaptive" && c.schedule != "fixed") throw ConfigError("ppo.schedule must be adaptive or fixed");
  if (!(c.desired_kl > 0.0)) throw ConfigError("ppo.desired_kl must be positive");
  if (c.total_samples < 0) throw ConfigError("ppo.total_samples must be >= 0");
  if (!(c.reward_scale > 0.0)) throw ConfigError("ppo.reward_scale must be positive");
  if (c.checkpoint_interval < 0 || c.probe_interval < 0 || c.probe_rollouts < 1 || c.threads < 0)
    throw ConfigError("ppo intervals and counts must be non-negative");
}

#define SYMMIMIC_PPO_FIELDS(X)                                                                            \
  X(num_envs) X(steps_per_env) X(learning_epochs) X(minibatch_size) X(gamma) X(lambda) X(clip)            \
  X(entropy_coef) X(value_coef) X(desired_kl) X(learning_rate) X(schedule) X(lr_min) X(lr_max)             \
  X(symmetry_coef) X(max_grad_norm) X(total_samples) X(actor_hidden) X(critic_hidden) X(activation)        \
  X(init_log_std) X(reward_scale) X(symmetric_normalizer) X(checkpoint_interval) X(probe_interval)         \
  X(probe_rollouts) X(seed) X(threads)

inline Json to_json(const PpoConfig& c) {
  Json j;
#define X(f) j[#f] = c.f;
  SYMMIMIC_PPO_FIELDS(X)
#undef X
  return j;
}

inline PpoConfig ppo_config_from_json(const Json& j, PpoConfig c = {}) {
#define X(f) #f,
  check_keys(j, {SYMMIMIC_PPO_FIELDS(X)}, "ppo");
#undef X
#define X(f) read_opt(j, #f, c.f);
  SYMMIMIC_PPO_FIELDS(X)
#undef X
  validate(c);
  return c;
}

struct DaggerConfig {
  int num_envs = 32;
  int steps_per_env = 24;
  int learning_epochs = 5;
  int minibatch_size = 0;  // 0: a quarter of the (augmented) batch
  double learning_rate = 1e-3;
  double max_grad_norm = 1.0;
  long long total_samples = 500'000;
  bool mirror_augmentation = true;
  std::string observation = "student";  // student | teacher
  std::vector<int> hidden = {256, 128, 64};
  std::string activation = "elu";
  int checkpoint_interval = 50;
  std::uint64_t seed = 0;
  int threads = 0;

  int batch_size() const { return num_envs * steps_per_env * (mirror_augmentation ? 2 : 1); }
  int minibatch() const { return minibatch_size > 0 ? minibatch_size : batch_size() / 4; }
};

inline void validate(const DaggerConfig& c) {
  if (c.num_envs < 1 || c.steps_per_env < 1 || c.learning_epochs < 1)
    throw ConfigError("dagger.num_envs, steps_per_env and learning_epochs must be >= 1");
  if (c.minibatch() < 1 || c.batch_size() % c.minibatch() != 0)
    throw ConfigError("dagger.minibatch_size must divide the (augmented) batch");
  if (!(c.learning_rate > 0.0)) throw ConfigError("dagger.learning_rate must be positive");
  if (c.total_samples < 0) throw ConfigError("dagger.total_samples must be >= 0");
  if (c.observation != "student" && c.observation != "teacher")
    throw ConfigError("dagger.observation must be student or teacher");
  if (c.checkpoint_interval < 0 || c.threads < 0) throw ConfigError("dagger intervals must be >= 0");
}

#define SYMMIMIC_DAGGER_FIELDS(X)                                                                        \
  X(num_envs) X(steps_per_env) X(learning_epochs) X(minibatch_size) X(learning_rate) X(max_grad_norm)    \
  X(total_samples) X(mirror_augmentation) X(observation) X(hidden) X(activation) X(checkpoint_interval)   \
  X(seed) X(threads)

inline Json to_json(const DaggerConfig& c) {
  Json j;
#define X(f) j[#f] = c.f;
  SYMMIMIC_DAGGER_FIELDS(X)
#undef X
  return j;
}

inline DaggerConfig dagger_config_from_json(const Json& j, DaggerConfig c = {}) {
#define X(f) #f,
  check_keys(j, {SYMMIMIC_DAGGER_FIELDS(X)}, "dagger");
#undef X
#define X(f) read_opt(j, #f, c.f);
  SYMMIMIC_DAGGER_FIELDS(X)
#undef X
  validate(c);
  return c;
}

}  // namespace symmimic
