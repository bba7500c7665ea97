#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "symmimic/cli/log.hpp"
#include "symmimic/core/parallel.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/eval/report.hpp"
#include "symmimic/motion/corrupt.hpp"
#include "symmimic/train/config.hpp"

namespace symmimic {

/// Everything a command reads. Seeds and thread counts live only at the top
/// level and are copied into the sections by resolve().
struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: SYMMIMIC_THREADS or 1
  std::string output_dir = "out";
  std::string log_level;  // empty: SYMMIMIC_LOG_LEVEL or "info"
  std::string model = "mini-humanoid";
  std::string motions;
  std::string probe_motions;  // held-out motions for the training SR probe
  std::string teacher;        // teacher checkpoint for distillation
  EnvConfig env;
  RewardConfig reward;
  DomainRandConfig randomization;
  PpoConfig ppo;
  DaggerConfig dagger;
  EvalConfig eval;
  NoiseSpec noise;
};

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
  std::optional<std::string> log_level;
  std::optional<std::string> model;
  std::optional<std::string> motions;
  std::optional<std::string> probe_motions;
  std::optional<std::string> teacher;
};

namespace detail {

inline void reject_local_globals(const Json& section, const std::string& name) {
  for (const char* k : {"seed", "threads"})
    if (section.contains(k))
      throw ConfigError(name + "." + k + ": set '" + k + "' at the top level of the run config");
}

}  // namespace detail

inline RunConfig run_config_from_json(const Json& j) {
  check_keys(j,
             {"seed", "threads", "output_dir", "log_level", "model", "motions", "probe_motions", "teacher", "env",
              "reward", "randomization", "ppo", "dagger", "eval", "noise"},
             "run config");
  RunConfig c;
  read_opt(j, "seed", c.seed);
  read_opt(j, "threads", c.threads);
  read_opt(j, "output_dir", c.output_dir);
  read_opt(j, "log_level", c.log_level);
  read_opt(j, "model", c.model);
  read_opt(j, "motions", c.motions);
  read_opt(j, "probe_motions", c.probe_motions);
  read_opt(j, "teacher", c.teacher);
  if (j.contains("env")) c.env = env_config_from_json(j.at("env"));
  if (j.contains("reward")) c.reward = reward_config_from_json(j.at("reward"));
  if (j.contains("randomization")) c.randomization = rand_config_from_json(j.at("randomization"));
  for (const char* s : {"ppo", "dagger", "eval", "noise"})
    if (j.contains(s)) detail::reject_local_globals(j.at(s), s);
  if (j.contains("ppo")) c.ppo = ppo_config_from_json(j.at("ppo"));
  if (j.contains("dagger")) c.dagger = dagger_config_from_json(j.at("dagger"));
  if (j.contains("eval")) c.eval = eval_config_from_json(j.at("eval"));
  if (j.contains("noise")) c.noise = noise_spec_from_json(j.at("noise"));
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return run_config_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Applies overrides, fills the environment-variable defaults and copies the
/// global seed and thread count into every section.
inline RunConfig resolve(RunConfig c, const ConfigOverrides& o = {}) {
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.log_level) c.log_level = *o.log_level;
  if (o.model) c.model = *o.model;
  if (o.motions) c.motions = *o.motions;
  if (o.probe_motions) c.probe_motions = *o.probe_motions;
  if (o.teacher) c.teacher = *o.teacher;
  if (c.threads < 0) throw ConfigError("threads must be >= 0");
  if (c.threads == 0) c.threads = default_thread_count();
  if (c.log_level.empty()) c.log_level = env_log_level();
  log_level_from_string(c.log_level);
  c.ppo.seed = c.dagger.seed = c.eval.seed = c.noise.seed = c.seed;
  c.ppo.threads = c.dagger.threads = c.eval.threads = c.threads;
  validate(c.env);
  validate(c.ppo);
  validate(c.dagger);
  validate(c.eval);
  validate(c.noise);
  return c;
}

inline Json to_json(const RunConfig& c) {
  auto drop = [](Json j) {
    j.erase("seed");
    j.erase("threads");
    return j;
  };
  return {{"seed", c.seed},
          {"threads", c.threads},
          {"output_dir", c.output_dir},
          {"log_level", c.log_level},
          {"model", c.model},
          {"motions", c.motions},
          {"probe_motions", c.probe_motions},
          {"teacher", c.teacher},
          {"env", to_json(c.env)},
          {"reward", to_json(c.reward)},
          {"randomization", to_json(c.randomization)},
          {"ppo", drop(to_json(c.ppo))},
          {"dagger", drop(to_json(c.dagger))},
          {"eval", drop(to_json(c.eval))},
          {"noise", drop(to_json(c.noise))}};
}

/// Writes `<dir>/<name>.resolved.json`: the command, its arguments and the
/// resolved config. The config part loads back with run_config_from_json.
inline std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& name,
                                            const Json& arguments, const RunConfig& c) {
  const auto path = dir / (name + ".resolved.json");
  write_json_file(path, Json{{"command", name}, {"arguments", arguments}, {"config", to_json(c)}});
  return path;
}

}  // namespace symmimic
