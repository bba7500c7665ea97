// symmimic: command-line front end. Option parsing only; the commands live in
// include/symmimic/cli/commands.hpp.

#include <CLI11.hpp>

#include <iostream>

#include "symmimic/cli/commands.hpp"

using namespace symmimic;

namespace {

struct Globals {
  std::string config;
  ConfigOverrides o;
};

// Config file, then command-line overrides, then environment defaults.
RunConfig build_config(const Globals& g, const std::function<void(RunConfig&)>& local = {}) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (local) local(c);
  c = resolve(c, g.o);
  log_threshold() = log_level_from_string(c.log_level);
  return c;
}

template <class T>
void set_if(const std::optional<T>& v, T& target) {
  if (v) target = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric motion-imitation toolkit: robot models, reference motions, PPO teacher training, "
               "student distillation and evaluation."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.o.seed, "Global seed");
  app.add_option("--threads", g.o.threads, "Worker threads (default: SYMMIMIC_THREADS or 1)");
  app.add_option("--out", g.o.output_dir, "Output directory or file");
  app.add_option("--log-level", g.o.log_level, "error | warn | info | debug (default: SYMMIMIC_LOG_LEVEL or info)");
  app.add_option("--model", g.o.model, "Built-in model name or model file");
  app.add_option("--motions", g.o.motions, "Motion dataset directory or clip file");

  std::function<int()> action;

  // model validate
  auto* model = app.add_subcommand("model", "Robot model tools");
  model->require_subcommand(1);
  std::string model_arg;
  auto* validate_cmd = model->add_subcommand("validate", "Check a model and print diagnostics");
  validate_cmd->add_option("model", model_arg, "Built-in name or model file")->required();
  validate_cmd->callback([&] {
    action = [&] { return run_command([&] { cmd_model_validate(model_arg, std::cout); }); };
  });

  // motion gen | corrupt | info
  auto* motion = app.add_subcommand("motion", "Reference motion tools");
  motion->require_subcommand(1);
  MotionGenArgs gen;
  auto* gen_cmd = motion->add_subcommand("gen", "Generate a procedural clip, or a dataset with kind 'dataset'");
  gen_cmd->add_option("kind", gen.kind, "stand | wave | reach | squat | walk_in_place | swing | composite | dataset")
      ->required();
  gen_cmd->add_option("duration", gen.duration, "Duration per clip, e.g. 2s or 1500ms");
  gen_cmd->add_option("--amplitude", gen.amplitude, "rad");
  gen_cmd->add_option("--frequency", gen.frequency, "Hz");
  gen_cmd->add_option("--side", gen.side, "left | right | both");
  gen_cmd->add_option("--fps", gen.fps);
  gen_cmd->add_option("--heading", gen.heading, "Root yaw, rad");
  gen_cmd->add_option("--count", gen.count, "Clips in a dataset");
  gen_cmd->callback([&] {
    action = [&] { return run_command([&] { cmd_motion_gen(gen, build_config(g)); }); };
  });

  std::string corrupt_in, noise_file;
  std::optional<double> kp_noise, occlusion, occlusion_hold, spike_prob, spike_mag, drift, lr_swap, lr_swap_dur;
  auto* corrupt_cmd = motion->add_subcommand("corrupt", "Apply reconstruction-style noise to clips");
  corrupt_cmd->add_option("input", corrupt_in, "Clip file or dataset directory")->required();
  corrupt_cmd->add_option("--noise-config", noise_file, "Noise spec (JSON)")->check(CLI::ExistingFile);
  corrupt_cmd->add_option("--keypoint-noise", kp_noise, "Gaussian noise std");
  corrupt_cmd->add_option("--occlusion", occlusion, "Per-limb occlusion probability");
  corrupt_cmd->add_option("--occlusion-hold", occlusion_hold, "Occlusion segment, s");
  corrupt_cmd->add_option("--spike-prob", spike_prob, "Per-frame pose spike probability");
  corrupt_cmd->add_option("--spike-magnitude", spike_mag, "rad");
  corrupt_cmd->add_option("--drift", drift, "Root drift rate, m/s");
  corrupt_cmd->add_option("--lr-swap", lr_swap, "Per-clip left/right swap probability");
  corrupt_cmd->add_option("--lr-swap-duration", lr_swap_dur, "s");
  corrupt_cmd->callback([&] {
    action = [&] {
      return run_command([&] {
        cmd_motion_corrupt(corrupt_in, build_config(g, [&](RunConfig& c) {
                             if (!noise_file.empty()) c.noise = noise_spec_from_json(read_json_file(noise_file));
                             set_if(kp_noise, c.noise.keypoint_noise_std);
                             set_if(occlusion, c.noise.occlusion_prob);
                             set_if(occlusion_hold, c.noise.occlusion_hold);
                             set_if(spike_prob, c.noise.spike_prob);
                             set_if(spike_mag, c.noise.spike_magnitude);
                             set_if(drift, c.noise.drift_rate);
                             set_if(lr_swap, c.noise.lr_swap_prob);
                             set_if(lr_swap_dur, c.noise.lr_swap_duration);
                           }));
      });
    };
  });

  std::string info_in;
  auto* info_cmd = motion->add_subcommand("info", "Describe clips");
  info_cmd->add_option("input", info_in, "Clip file or dataset directory")->required();
  info_cmd->callback([&] {
    action = [&] { return run_command([&] { cmd_motion_info(info_in, build_config(g), std::cout); }); };
  });

  // train teacher
  auto* train = app.add_subcommand("train", "Policy training");
  train->require_subcommand(1);
  std::optional<long long> teacher_budget;
  std::optional<int> num_envs;
  std::optional<double> sym_coef;
  bool resume = false;
  auto* teacher_cmd = train->add_subcommand("teacher", "PPO training of the privileged teacher");
  teacher_cmd->add_option("--budget", teacher_budget, "Environment samples");
  teacher_cmd->add_option("--num-envs", num_envs);
  teacher_cmd->add_option("--symmetry-coef", sym_coef, "Weight of the symmetry surrogate (0 disables it)");
  teacher_cmd->add_option("--probe-motions", g.o.probe_motions, "Held-out motions for the SR probe");
  teacher_cmd->add_flag("--resume", resume, "Continue from <out>/resume.json");
  teacher_cmd->callback([&] {
    action = [&] {
      return run_command([&] {
        cmd_train_teacher(build_config(g,
                                       [&](RunConfig& c) {
                                         set_if(teacher_budget, c.ppo.total_samples);
                                         set_if(num_envs, c.ppo.num_envs);
                                         set_if(sym_coef, c.ppo.symmetry_coef);
                                       }),
                          resume);
      });
    };
  });

  // distill student
  auto* distill = app.add_subcommand("distill", "Teacher-student distillation");
  distill->require_subcommand(1);
  std::optional<long long> student_budget;
  std::optional<std::string> student_obs;
  bool no_augment = false;
  auto* student_cmd = distill->add_subcommand("student", "DAgger distillation of a deployable student");
  student_cmd->add_option("--teacher", g.o.teacher, "Teacher checkpoint");
  student_cmd->add_option("--budget", student_budget, "Environment samples");
  student_cmd->add_option("--observation", student_obs, "student | teacher");
  student_cmd->add_flag("--no-augment", no_augment, "Disable mirror augmentation");
  student_cmd->callback([&] {
    action = [&] {
      return run_command([&] {
        cmd_distill_student(build_config(g, [&](RunConfig& c) {
          set_if(student_budget, c.dagger.total_samples);
          set_if(student_obs, c.dagger.observation);
          if (no_augment) c.dagger.mirror_augmentation = false;
        }));
      });
    };
  });

  // eval
  std::string policy;
  std::vector<std::string> formats = {"json", "csv"};
  std::optional<int> rollouts;
  std::optional<double> threshold;
  bool no_terminate = false, no_random = false;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a policy on a motion dataset");
  eval_cmd->add_option("--policy", policy, "Checkpoint file, or 'playback'")->required();
  eval_cmd->add_option("--format", formats, "json | csv | plot-data (repeatable)");
  eval_cmd->add_option("--rollouts", rollouts, "Rollouts per motion");
  eval_cmd->add_option("--threshold", threshold, "Termination deviation, m");
  eval_cmd->add_flag("--no-terminate", no_terminate, "Only the no-termination pass");
  eval_cmd->add_flag("--no-randomization", no_random, "Evaluate without domain randomization");
  eval_cmd->callback([&] {
    action = [&] {
      return run_command([&] {
        cmd_eval(policy, formats,
                 build_config(g,
                              [&](RunConfig& c) {
                                set_if(rollouts, c.eval.rollouts_per_motion);
                                set_if(threshold, c.eval.deviation_threshold);
                                if (no_terminate) c.eval.terminate = false;
                                if (no_random) c.eval.randomization = false;
                              }),
                 std::cout);
      });
    };
  });

  // sim rollout
  auto* sim = app.add_subcommand("sim", "Simulation tools");
  sim->require_subcommand(1);
  RolloutArgs ra;
  bool sim_no_terminate = false, sim_random = false;
  auto* rollout_cmd = sim->add_subcommand("rollout", "Run one motion and dump the trajectory (JSON lines)");
  rollout_cmd->add_option("--policy", ra.policy, "Checkpoint file, or 'playback'");
  rollout_cmd->add_option("--motion-index", ra.motion, "Index into the motion dataset");
  rollout_cmd->add_flag("--no-terminate", sim_no_terminate, "Keep going after the robot deviates");
  rollout_cmd->add_flag("--randomize", sim_random, "Apply domain randomization");
  rollout_cmd->callback([&] {
    action = [&] {
      ra.terminate = !sim_no_terminate;
      return run_command([&] {
        cmd_sim_rollout(ra, build_config(g, [&](RunConfig& c) { c.eval.randomization = sim_random; }), std::cout);
      });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return action ? action() : kExitConfig;
}
