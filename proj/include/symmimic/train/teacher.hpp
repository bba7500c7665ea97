#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "symmimic/core/parallel.hpp"
#include "symmimic/eval/rollout.hpp"
#include "symmimic/net/checkpoint.hpp"
#include "symmimic/train/ppo.hpp"

namespace symmimic {

inline MirrorMaps teacher_mirror_maps(const RobotModel& m, const ObsLayout& l) {
  return {teacher_mirror(m, l), action_mirror(m)};
}

/// Tracking-reward fraction in [0, 1]: weighted tracking terms over their
/// weight sum.
inline double tracking_fraction(const RewardTerms& r, const RewardConfig& c) {
  const double w = c.w_joint_pos + c.w_joint_vel + c.w_body_pos + c.w_body_rot;
  return (r.weighted[kJointPos] + r.weighted[kJointVel] + r.weighted[kBodyPos] + r.weighted[kBodyRot]) / w;
}

/// Mean tracking fraction of one full, untruncated pass over `motion` with
/// the deterministic policy.
inline double policy_tracking(EnvSpec spec, const PolicyCheckpoint& c, int motion, std::uint64_t seed) {
  spec.env.terminate = false;
  spec.env.resample_on_motion_end = false;
  spec.env.random_start = false;
  spec.env.max_episode_steps = std::numeric_limits<int>::max();
  TrackingEnv env(spec, seed);
  env.set_auto_reset(false);
  env.reset(motion);
  const StepFn pol = checkpoint_policy(c);
  double sum = 0.0;
  int steps = 0;
  for (;;) {
    const EnvStep s = pol(env);
    sum += tracking_fraction(s.reward, spec.reward);
    ++steps;
    if (s.done()) break;
  }
  return sum / steps;
}

/// PPO training of the privileged teacher over a set of environments.
class TeacherTrainer {
 public:
  TeacherTrainer(EnvSpec spec, const PpoConfig& config)
      : spec_(std::move(spec)), config_(config), layout_(make_layout(*spec_.model, spec_.env)),
        learner_(layout_.teacher(), layout_.teacher(), spec_.model->num_joints(), config,
                 teacher_mirror_maps(*spec_.model, layout_)),
        action_rng_(mix_seed(config.seed, 3)) {
    validate(config);
    spec_.build_student = false;
    for (int e = 0; e < config.num_envs; ++e) {
      envs_.emplace_back(spec_, mix_seed(config.seed, 100 + static_cast<std::uint64_t>(e)));
      envs_.back().reset();
    }
    ep_return_.assign(config.num_envs, 0.0);
    ep_length_.assign(config.num_envs, 0);
    learner_.update_normalizers(gather(&TrackingEnv::teacher_obs), gather(&TrackingEnv::critic_obs));
  }

  const PpoConfig& config() const { return config_; }
  const EnvSpec& spec() const { return spec_; }
  PpoLearner& learner() { return learner_; }
  const PpoLearner& learner() const { return learner_; }
  long long samples() const { return samples_; }
  int iteration() const { return iteration_; }
  bool done() const { return samples_ >= config_.total_samples; }
  int threads() const { return config_.threads > 0 ? config_.threads : default_thread_count(); }

  /// Held-out motions for the periodic success-rate probe.
  void set_probe(EnvSpec probe) { probe_ = std::move(probe); }

  /// One collect + update round; returns the log record.
  Json iterate() {
    const RobotModel& m = *spec_.model;
    const int E = config_.num_envs, T = config_.steps_per_env, n = m.num_joints();
    const int D = layout_.teacher();
    PpoBatch batch;
    batch.obs.resize(D, T * E);
    batch.critic_obs.resize(D, T * E);
    batch.actions.resize(n, T * E);
    batch.old_mean.resize(n, T * E);
    batch.old_log_prob.resize(T * E);
    batch.old_log_std = learner_.actor.log_std();
    MatX rewards(E, T), values(E, T);
    std::vector<std::vector<bool>> dones(E, std::vector<bool>(T, false));
    std::array<double, kNumRewardTerms> term_sum{};
    double total_sum = 0.0, tracking_sum = 0.0;
    std::map<std::string, int> ends;
    std::vector<double> finished_returns, finished_lengths;
    std::vector<EnvStep> results(E);

    for (int t = 0; t < T; ++t) {
      const MatX obs = gather(&TrackingEnv::teacher_obs);
      const MatX cobs = gather(&TrackingEnv::critic_obs);
      const MatX mu = learner_.actor.mean(learner_.actor_norm.normalize(obs));
      MatX act(n, E);
      for (int e = 0; e < E; ++e) act.col(e) = learner_.actor.sample(mu.col(e), action_rng_);
      const VecX logp = learner_.actor.log_prob(mu, act);
      const VecX v = learner_.values(cobs);
      parallel_for(E, threads(), [&](int e) { results[e] = envs_[e].step(act.col(e)); });

      std::vector<int> truncated;
      for (int e = 0; e < E; ++e)
        if (results[e].truncated && !results[e].terminated) truncated.push_back(e);
      VecX bootstrap = VecX::Zero(E);
      if (!truncated.empty()) {
        MatX fin(D, static_cast<int>(truncated.size()));
        for (std::size_t i = 0; i < truncated.size(); ++i) fin.col(i) = results[truncated[i]].final_critic_obs;
        const VecX fv = learner_.values(fin);
        for (std::size_t i = 0; i < truncated.size(); ++i) bootstrap[truncated[i]] = fv[i];
      }
      for (int e = 0; e < E; ++e) {
        const int col = t * E + e;
        batch.obs.col(col) = obs.col(e);
        batch.critic_obs.col(col) = cobs.col(e);
        batch.actions.col(col) = act.col(e);
        batch.old_mean.col(col) = mu.col(e);
        batch.old_log_prob[col] = logp[e];
        const EnvStep& r = results[e];
        // Time-limit endings bootstrap from the value of the final state.
        rewards(e, t) = config_.reward_scale * r.reward.total + config_.gamma * bootstrap[e];
        values(e, t) = v[e];
        dones[e][t] = r.done();
        for (int k = 0; k < kNumRewardTerms; ++k) term_sum[k] += r.reward.weighted[k];
        total_sum += r.reward.total;
        tracking_sum += tracking_fraction(r.reward, spec_.reward);
        ep_return_[e] += r.reward.total;
        ++ep_length_[e];
        if (r.done()) {
          ++ends[r.reason];
          finished_returns.push_back(ep_return_[e]);
          finished_lengths.push_back(ep_length_[e]);
          ep_return_[e] = 0.0;
          ep_length_[e] = 0;
        }
      }
    }
    const VecX last = learner_.values(gather(&TrackingEnv::critic_obs));
    batch.advantages.resize(T * E);
    batch.returns.resize(T * E);
    for (int e = 0; e < E; ++e) {
      const GaeResult g = compute_gae(rewards.row(e).transpose(), values.row(e).transpose(), dones[e], last[e],
                                      config_.gamma, config_.lambda);
      for (int t = 0; t < T; ++t) {
        batch.advantages[t * E + e] = g.advantages[t];
        batch.returns[t * E + e] = g.returns[t];
      }
    }
    normalize_advantages(batch.advantages);
    const UpdateStats st = learner_.update(batch);
    learner_.update_normalizers(batch.obs, batch.critic_obs);
    samples_ += static_cast<long long>(T) * E;
    ++iteration_;

    const double steps = static_cast<double>(T) * E;
    Json terms = Json::object();
    for (int k = 0; k < kNumRewardTerms; ++k) terms[reward_term_names()[k]] = term_sum[k] / steps;
    Json log = {{"iteration", iteration_},
                {"samples", samples_},
                {"loss", st.to_json()},
                {"reward", total_sum / steps},
                {"tracking", tracking_sum / steps},
                {"reward_terms", terms},
                {"episodes", finished_returns.size()},
                {"episode_ends", ends},
                {"action_std", learner_.actor.std().mean()}};
    if (!finished_returns.empty()) {
      log["episode_return"] = std::accumulate(finished_returns.begin(), finished_returns.end(), 0.0) /
                              static_cast<double>(finished_returns.size());
      log["episode_length"] = std::accumulate(finished_lengths.begin(), finished_lengths.end(), 0.0) /
                              static_cast<double>(finished_lengths.size());
    }
    if (probe_ && config_.probe_interval > 0 && iteration_ % config_.probe_interval == 0) log["probe_sr"] = probe_sr();
    return log;
  }

  /// Success rate of the deterministic policy on the probe motions, percent.
  double probe_sr() const {
    const PolicyCheckpoint c = checkpoint();
    const StepFn pol = checkpoint_policy(c);
    const int motions = static_cast<int>(probe_->motions->size());
    std::vector<int> ok(static_cast<std::size_t>(motions) * config_.probe_rollouts, 0);
    parallel_for(static_cast<int>(ok.size()), threads(), [&](int i) {
      const auto rec = rollout(*probe_, i / config_.probe_rollouts, pol, true, mix_seed(config_.seed, 7000 + i));
      ok[i] = rec.terminated ? 0 : 1;
    });
    return 100.0 * std::accumulate(ok.begin(), ok.end(), 0) / static_cast<double>(ok.size());
  }

  PolicyCheckpoint checkpoint() const {
    PolicyCheckpoint c;
    c.role = "teacher";
    c.observation = "teacher";
    c.actor = learner_.actor;
    c.actor_norm = learner_.actor_norm;
    c.critic = learner_.critic;
    c.critic_norm = learner_.critic_norm;
    c.samples = samples_;
    c.iteration = iteration_;
    c.model = model_to_json(*spec_.model);
    c.env_config = to_json(spec_.env);
    c.extra = {{"ppo", to_json(config_)}, {"reward", to_json(spec_.reward)},
               {"randomization", to_json(spec_.randomization)}};
    return c;
  }

  /// Full trainer state for bit-exact resumption.
  Json save_state() const {
    Json envs = Json::array();
    for (const auto& e : envs_) envs.push_back(e.save());
    return {{"format", "symmimic-teacher-state"},
            {"iteration", iteration_},
            {"samples", samples_},
            {"learner", learner_.save()},
            {"action_rng", action_rng_.serialize()},
            {"envs", envs},
            {"episode_return", ep_return_},
            {"episode_length", ep_length_}};
  }
  void load_state(const Json& j) {
    if (j.value("format", "") != "symmimic-teacher-state") throw DataError("not a teacher training state");
    if (j.at("envs").size() != envs_.size()) throw ConfigError("resume state has a different num_envs");
    iteration_ = j.at("iteration").get<int>();
    samples_ = j.at("samples").get<long long>();
    learner_.load(j.at("learner"));
    action_rng_.deserialize(j.at("action_rng").get<std::string>());
    for (std::size_t e = 0; e < envs_.size(); ++e) envs_[e].load(j.at("envs").at(e));
    ep_return_ = j.at("episode_return").get<std::vector<double>>();
    ep_length_ = j.at("episode_length").get<std::vector<int>>();
  }

  const std::vector<TrackingEnv>& envs() const { return envs_; }

 private:
  MatX gather(const VecX& (TrackingEnv::*get)() const) const {
    MatX out((envs_.front().*get)().size(), static_cast<int>(envs_.size()));
    for (std::size_t e = 0; e < envs_.size(); ++e) out.col(static_cast<int>(e)) = (envs_[e].*get)();
    return out;
  }

  EnvSpec spec_;
  PpoConfig config_;
  ObsLayout layout_;
  PpoLearner learner_;
  Rng action_rng_;
  std::vector<TrackingEnv> envs_;
  std::vector<double> ep_return_;
  std::vector<int> ep_length_;
  std::optional<EnvSpec> probe_;
  long long samples_ = 0;
  int iteration_ = 0;
};

struct TrainOutput {
  std::filesystem::path dir;  // empty: nothing is written
  std::function<void(const Json&)> on_log;
};

/// Trains until the sample budget is spent. With an output directory it
/// writes train_log.jsonl, checkpoints/iter_NNNNNN.json, teacher.json and
/// resume.json (the trainer state for --resume).
inline PolicyCheckpoint train_teacher(TeacherTrainer& trainer, const TrainOutput& out = {}) {
  std::ofstream log;
  if (!out.dir.empty()) {
    std::filesystem::create_directories(out.dir / "checkpoints");
    log.open(out.dir / "train_log.jsonl", trainer.iteration() > 0 ? std::ios::app : std::ios::trunc);
  }
  const int every = trainer.config().checkpoint_interval;
  while (!trainer.done()) {
    const Json rec = trainer.iterate();
    if (out.on_log) out.on_log(rec);
    if (log) log << rec.dump() << "\n" << std::flush;
    if (!out.dir.empty() && every > 0 && trainer.iteration() % every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "iter_%06d.json", trainer.iteration());
      save_checkpoint(trainer.checkpoint(), out.dir / "checkpoints" / name);
      write_text_file(out.dir / "resume.json", trainer.save_state().dump() + "\n");
    }
  }
  PolicyCheckpoint c = trainer.checkpoint();
  if (!out.dir.empty()) {
    save_checkpoint(c, out.dir / "teacher.json");
    write_text_file(out.dir / "resume.json", trainer.save_state().dump() + "\n");
  }
  return c;
}

}  // namespace symmimic
