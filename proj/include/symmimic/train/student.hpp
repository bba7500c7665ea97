#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <vector>

#include "symmimic/core/parallel.hpp"
#include "symmimic/net/checkpoint.hpp"
#include "symmimic/train/config.hpp"
#include "symmimic/train/ppo.hpp"
#include "symmimic/train/teacher.hpp"

namespace symmimic {

/// DAgger: the student drives the environments, the teacher labels every
/// visited state, and the student regresses onto the labels. With mirror
/// augmentation every (obs, label) pair is joined by (T_s obs, T_a label).
class StudentDistiller {
 public:
  StudentDistiller(EnvSpec spec, PolicyCheckpoint teacher, const DaggerConfig& config)
      : spec_(std::move(spec)), teacher_(std::move(teacher)), config_(config),
        layout_(make_layout(*spec_.model, spec_.env)) {
    validate(config);
    if (teacher_.observation != "teacher") throw ConfigError("distillation needs a teacher-observation policy");
    if (teacher_.actor.obs_dim() != layout_.teacher())
      throw DataError("teacher checkpoint does not match the environment layout");
    use_student_obs_ = config.observation == "student";
    spec_.build_student = use_student_obs_;
    const RobotModel& m = *spec_.model;
    obs_mirror_ = use_student_obs_ ? student_mirror(m, layout_) : teacher_mirror(m, layout_);
    act_mirror_ = action_mirror(m);
    const int D = use_student_obs_ ? layout_.student() : layout_.teacher();
    student_ = GaussianPolicy(MlpSpec{D, config.hidden, m.num_joints(), config.activation, mix_seed(config.seed, 11),
                                      0.01});
    norm_ = RunningNorm(D);
    optimizer_ = Adam(student_.mean_net().num_params(), AdamConfig{config.learning_rate});
    shuffle_rng_ = Rng(mix_seed(config.seed, 12));
    for (int e = 0; e < config.num_envs; ++e) {
      envs_.emplace_back(spec_, mix_seed(config.seed, 200 + static_cast<std::uint64_t>(e)));
      envs_.back().reset();
    }
    update_norm(gather_student());
  }

  /// Starts from an existing actor (same observation layout).
  void init_from(const PolicyCheckpoint& c) {
    if (c.actor.obs_dim() != norm_.dim()) throw ConfigError("initial student does not match the observation layout");
    student_ = c.actor;
    norm_ = c.actor_norm;
    optimizer_ = Adam(student_.mean_net().num_params(), AdamConfig{config_.learning_rate});
  }

  const GaussianPolicy& student() const { return student_; }
  const RunningNorm& normalizer() const { return norm_; }
  const SignedPermutation& obs_mirror() const { return obs_mirror_; }
  long long samples() const { return samples_; }
  int iteration() const { return iteration_; }
  bool done() const { return samples_ >= config_.total_samples; }
  int last_batch_size() const { return last_batch_; }

  Json iterate() {
    const int E = config_.num_envs, T = config_.steps_per_env;
    const int D = norm_.dim(), n = spec_.model->num_joints();
    MatX obs(D, T * E), labels(n, T * E);
    std::vector<EnvStep> results(E);
    double reward = 0.0, tracking = 0.0;
    int ends = 0;
    const int threads = config_.threads > 0 ? config_.threads : default_thread_count();
    for (int t = 0; t < T; ++t) {
      const MatX so = gather_student();
      const MatX to = gather(&TrackingEnv::teacher_obs);
      const MatX act = student_.mean(norm_.normalize(so));
      const MatX lab = teacher_.act_batch(to);
      obs.middleCols(t * E, E) = so;
      labels.middleCols(t * E, E) = lab;
      parallel_for(E, threads, [&](int e) { results[e] = envs_[e].step(act.col(e)); });
      for (const auto& r : results) {
        reward += r.reward.total;
        tracking += tracking_fraction(r.reward, spec_.reward);
        ends += r.done() ? 1 : 0;
      }
    }
    MatX X = obs, Y = labels;
    if (config_.mirror_augmentation) {
      X.conservativeResize(D, 2 * T * E);
      Y.conservativeResize(n, 2 * T * E);
      X.rightCols(T * E) = obs_mirror_.apply_rows(obs);
      Y.rightCols(T * E) = act_mirror_.apply_rows(labels);
    }
    last_batch_ = static_cast<int>(X.cols());
    const auto [loss, final_loss] = fit(X, Y);
    update_norm(obs);
    samples_ += static_cast<long long>(T) * E;
    ++iteration_;
    const double steps = static_cast<double>(T) * E;
    return {{"iteration", iteration_}, {"samples", samples_},          {"loss", loss},
            {"final_loss", final_loss}, {"batch", last_batch_},    {"reward", reward / steps},     {"tracking", tracking / steps},
            {"episode_ends", ends}};
  }

  /// Mean squared action error of the current student on (X, Y).
  double action_loss(const MatX& X, const MatX& Y) const {
    return (student_.mean(norm_.normalize(X)) - Y).colwise().squaredNorm().mean();
  }

  PolicyCheckpoint checkpoint() const {
    PolicyCheckpoint c;
    c.role = "student";
    c.observation = use_student_obs_ ? "student" : "teacher";
    c.actor = student_;
    c.actor_norm = norm_;
    c.samples = samples_;
    c.iteration = iteration_;
    c.model = teacher_.model;
    c.env_config = to_json(spec_.env);
    c.extra = {{"dagger", to_json(config_)}};
    return c;
  }

 private:
  // Epochs of minibatch Adam steps on mean ||mu(x) - y||^2; returns the mean
  // minibatch loss of the first and of the last epoch.
  std::pair<double, double> fit(const MatX& X, const MatX& Y) {
    const int N = static_cast<int>(X.cols());
    const int mb = config_.minibatch_size > 0 ? config_.minibatch_size : N / 4;
    if (mb < 1 || N % mb != 0) throw ConfigError("dagger minibatch size must divide the batch");
    std::vector<int> order(N);
    double first_epoch = 0.0, last_epoch = 0.0;
    int count = 0;
    for (int ep = 0; ep < config_.learning_epochs; ++ep) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), shuffle_rng_.engine());
      for (int s = 0; s < N; s += mb) {
        MatX x(X.rows(), mb), y(Y.rows(), mb);
        for (int i = 0; i < mb; ++i) {
          x.col(i) = X.col(order[s + i]);
          y.col(i) = Y.col(order[s + i]);
        }
        MlpCache cache;
        const MatX mu = student_.mean(norm_.normalize(x), &cache);
        const MatX err = mu - y;
        const double l = err.colwise().squaredNorm().mean();
        if (ep == 0) {
          first_epoch += l;
          ++count;
        }
        if (ep == config_.learning_epochs - 1) last_epoch += l;
        VecX grad = student_.mean_net().backward(cache, (2.0 / mb) * err);
        clip_grad_norm(grad, config_.max_grad_norm);
        VecX p = student_.mean_net().params();
        optimizer_.step(p, grad);
        student_.mean_net().set_params(p);
      }
    }
    return {first_epoch / std::max(1, count), last_epoch / std::max(1, count)};
  }

  void update_norm(const MatX& obs) {
    norm_.update(obs);
    if (config_.mirror_augmentation) norm_.update(obs_mirror_.apply_rows(obs));
  }

  MatX gather(const VecX& (TrackingEnv::*get)() const) const {
    MatX out((envs_.front().*get)().size(), static_cast<int>(envs_.size()));
    for (std::size_t e = 0; e < envs_.size(); ++e) out.col(static_cast<int>(e)) = (envs_[e].*get)();
    return out;
  }
  MatX gather_student() const {
    return gather(use_student_obs_ ? &TrackingEnv::student_obs : &TrackingEnv::teacher_obs);
  }

  EnvSpec spec_;
  PolicyCheckpoint teacher_;
  DaggerConfig config_;
  ObsLayout layout_;
  bool use_student_obs_ = true;
  SignedPermutation obs_mirror_, act_mirror_;
  GaussianPolicy student_;
  RunningNorm norm_;
  Adam optimizer_;
  Rng shuffle_rng_;
  std::vector<TrackingEnv> envs_;
  long long samples_ = 0;
  int iteration_ = 0;
  int last_batch_ = 0;
};

/// Runs DAgger until the budget is spent; writes distill_log.jsonl,
/// checkpoints/student_iter_NNNNNN.json and student.json when `out.dir` is set.
inline PolicyCheckpoint distill_student(StudentDistiller& d, const DaggerConfig& config, const TrainOutput& out = {}) {
  std::ofstream log;
  if (!out.dir.empty()) {
    std::filesystem::create_directories(out.dir / "checkpoints");
    log.open(out.dir / "distill_log.jsonl", std::ios::trunc);
  }
  while (!d.done()) {
    const Json rec = d.iterate();
    if (out.on_log) out.on_log(rec);
    if (log) log << rec.dump() << "\n" << std::flush;
    if (!out.dir.empty() && config.checkpoint_interval > 0 && d.iteration() % config.checkpoint_interval == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "student_iter_%06d.json", d.iteration());
      save_checkpoint(d.checkpoint(), out.dir / "checkpoints" / name);
    }
  }
  PolicyCheckpoint c = d.checkpoint();
  if (!out.dir.empty()) save_checkpoint(c, out.dir / "student.json");
  return c;
}

}  // namespace symmimic
