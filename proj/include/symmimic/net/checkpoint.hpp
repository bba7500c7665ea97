#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "symmimic/net/adam.hpp"
#include "symmimic/net/normalizer.hpp"
#include "symmimic/net/policy.hpp"

namespace symmimic {

inline constexpr const char* kCheckpointFormat = "symmimic-policy";
inline constexpr int kCheckpointVersion = 1;

/// Everything needed to run a trained actor, plus the critic for teachers.
struct PolicyCheckpoint {
  std::string role = "teacher";        // teacher | student
  std::string observation = "teacher";  // observation the actor reads: teacher | student
  GaussianPolicy actor;
  RunningNorm actor_norm;
  std::optional<Mlp> critic;
  std::optional<RunningNorm> critic_norm;
  long long samples = 0;
  int iteration = 0;
  Json model;       // robot model document
  Json env_config;  // environment config the layouts were built from
  Json extra = Json::object();

  /// Deterministic action: the policy mean on the normalized observation.
  VecX act(const VecX& obs) const { return actor.mean(actor_norm.normalize(MatX(obs))).col(0); }
  MatX act_batch(const MatX& obs) const { return actor.mean(actor_norm.normalize(obs)); }
};

inline Json checkpoint_to_json(const PolicyCheckpoint& c) {
  Json j = {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"role", c.role},
            {"observation", c.observation},
            {"samples", c.samples},
            {"iteration", c.iteration},
            {"model", c.model},
            {"env_config", c.env_config},
            {"actor", {{"mean", to_json(c.actor.mean_net())}, {"log_std", vec_to_json(c.actor.log_std())}}},
            {"actor_norm", c.actor_norm.to_json()},
            {"extra", c.extra}};
  if (c.critic) j["critic"] = to_json(*c.critic);
  if (c.critic_norm) j["critic_norm"] = c.critic_norm->to_json();
  return j;
}

inline PolicyCheckpoint checkpoint_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kCheckpointFormat)
    throw DataError("not a policy checkpoint (missing format header)");
  const int version = j.at("version").get<int>();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  PolicyCheckpoint c;
  try {
    c.role = j.at("role").get<std::string>();
    c.observation = j.at("observation").get<std::string>();
    c.samples = j.at("samples").get<long long>();
    c.iteration = j.at("iteration").get<int>();
    c.model = j.at("model");
    c.env_config = j.at("env_config");
    const Mlp mean = mlp_from_json(j.at("actor").at("mean"));
    c.actor = GaussianPolicy(mean.spec());
    c.actor.mean_net().set_params(mean.params());
    c.actor.set_log_std(vec_from_json(j.at("actor").at("log_std")));
    c.actor_norm = RunningNorm::from_json(j.at("actor_norm"));
    if (j.contains("critic")) c.critic = mlp_from_json(j.at("critic"));
    if (j.contains("critic_norm")) c.critic_norm = RunningNorm::from_json(j.at("critic_norm"));
    if (j.contains("extra")) c.extra = j.at("extra");
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  if (c.role != "teacher" && c.role != "student") throw DataError("checkpoint role must be teacher or student");
  if (c.observation != "teacher" && c.observation != "student")
    throw DataError("checkpoint observation must be teacher or student");
  if (c.actor_norm.dim() != c.actor.obs_dim()) throw DataError("checkpoint normalizer does not match the actor");
  return c;
}

inline void save_checkpoint(const PolicyCheckpoint& c, const std::filesystem::path& path) {
  write_text_file(path, checkpoint_to_json(c).dump() + "\n");
}

inline PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

}  // namespace symmimic
