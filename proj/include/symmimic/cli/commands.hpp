#pragma once

#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "symmimic/cli/log.hpp"
#include "symmimic/cli/run_config.hpp"
#include "symmimic/eval/report.hpp"
#include "symmimic/eval/rollout.hpp"
#include "symmimic/motion/corrupt.hpp"
#include "symmimic/motion/generate.hpp"
#include "symmimic/train/student.hpp"
#include "symmimic/train/teacher.hpp"

// Command implementations behind the symmimic executable. Each command throws
// on failure; run_command maps the exception type to the process exit code.

namespace symmimic {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,  // unreadable, invalid or missing input data
  kExitInstability = 4,
};

template <class F>
int run_command(F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    log_message(LogLevel::kError, std::string("config error: ") + e.what());
    return kExitConfig;
  } catch (const InstabilityError& e) {
    log_message(LogLevel::kError, std::string("instability: ") + e.what());
    return kExitInstability;
  } catch (const Error& e) {
    log_message(LogLevel::kError, std::string("data error: ") + e.what());
    return kExitData;
  } catch (const Json::exception& e) {
    log_message(LogLevel::kError, std::string("data error: ") + e.what());
    return kExitData;
  } catch (const std::exception& e) {
    log_message(LogLevel::kError, e.what());
    return kExitFailure;
  }
}

inline std::string strprintf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

/// "2s", "2.5", "1500ms" -> seconds.
inline double parse_duration(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad duration '" + s + "'");
  }
  const std::string unit = s.substr(used);
  if (unit == "ms") v /= 1000.0;
  else if (!unit.empty() && unit != "s") throw ConfigError("bad duration unit in '" + s + "' (s or ms)");
  if (!(v > 0.0)) throw ConfigError("duration must be positive");
  return v;
}

namespace detail {

inline bool has_extension(const std::string& path, const char* ext) {
  return std::filesystem::path(path).extension() == ext;
}

// Directory that receives outputs (and the snapshot) for an output path that
// may name a file.
inline std::filesystem::path output_parent(const std::string& out, const char* file_ext) {
  if (!has_extension(out, file_ext)) return out;
  const auto p = std::filesystem::path(out).parent_path();
  return p.empty() ? std::filesystem::path(".") : p;
}

inline std::vector<MotionClip> require_motions(const std::string& path) {
  if (path.empty()) throw ConfigError("no motions given (--motions or \"motions\" in the run config)");
  auto clips = load_dataset(path);
  if (clips.empty()) throw DataError("no motions in " + path);
  return clips;
}

inline std::string dataset_id(const std::vector<MotionClip>& clips) {
  std::string all;
  for (const auto& c : clips) all += clip_to_json(c).dump();
  return hex64(fnv1a(all));
}

inline DomainRandConfig eval_randomization(const RunConfig& c) {
  return c.eval.randomization ? c.randomization : DomainRandConfig::none();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// model

inline void cmd_model_validate(const std::string& name_or_path, std::ostream& out) {
  const RobotModel m = load_model(name_or_path);
  out << "model\t" << m.name << "\n"
      << "links\t" << m.links.size() << "\n"
      << "joints\t" << m.num_joints() << "\n"
      << "keypoints\t" << m.keypoints.size() << "\n"
      << "feet\t" << m.feet.size() << "\n"
      << "contact_spheres\t" << m.contact_spheres.size() << "\n"
      << "fixed_base\t" << (m.fixed_base ? "yes" : "no") << "\n"
      << strprintf("total_mass\t%.6g\n", m.total_mass());
  const std::string defect = symmetry_defect(m);
  if (!defect.empty()) throw ValidationError("symmetry map: " + defect);
  out << "symmetry\tok\n";
}

// ---------------------------------------------------------------------------
// motion

struct MotionGenArgs {
  std::string kind = "stand";  // a generator kind, or "dataset"
  std::string duration = "4s";
  std::optional<double> amplitude, frequency, fps, heading;
  std::optional<std::string> side;
  int count = 12;  // dataset only
};

inline Json to_json(const MotionGenArgs& a) {
  Json j = {{"kind", a.kind}, {"duration", a.duration}, {"count", a.count}};
  if (a.amplitude) j["amplitude"] = *a.amplitude;
  if (a.frequency) j["frequency"] = *a.frequency;
  if (a.fps) j["fps"] = *a.fps;
  if (a.heading) j["heading"] = *a.heading;
  if (a.side) j["side"] = *a.side;
  return j;
}

/// Writes one clip (output ending in .json) or a directory of clips.
inline std::vector<std::filesystem::path> cmd_motion_gen(const MotionGenArgs& a, const RunConfig& c) {
  const RobotModel m = load_model(c.model);
  const double duration = parse_duration(a.duration);
  std::vector<std::filesystem::path> written;
  if (a.kind == "dataset") {
    if (a.count < 1) throw ConfigError("--count must be >= 1");
    if (detail::has_extension(c.output_dir, ".json")) throw ConfigError("a dataset needs an output directory");
    written = save_dataset(generate_dataset(m, a.count, c.seed, duration), c.output_dir);
  } else {
    GenParams p;
    p.kind = a.kind;
    p.duration = duration;
    if (a.amplitude) p.amplitude = *a.amplitude;
    if (a.frequency) p.frequency = *a.frequency;
    if (a.fps) p.fps = *a.fps;
    if (a.heading) p.heading = *a.heading;
    if (a.side) p.side = *a.side;
    const MotionClip clip = generate(p, m);
    const std::filesystem::path path = detail::has_extension(c.output_dir, ".json")
                                           ? std::filesystem::path(c.output_dir)
                                           : std::filesystem::path(c.output_dir) / (clip.name + ".json");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    save_clip(clip, path);
    written.push_back(path);
  }
  write_snapshot(detail::output_parent(c.output_dir, ".json"), "motion_gen", to_json(a), c);
  log_info(strprintf("wrote %zu clip(s)", written.size()));
  return written;
}

/// Corrupts every clip of `input` with c.noise. Clips draw independent noise
/// streams (the corruption seed is mixed with the clip name).
inline std::vector<std::filesystem::path> cmd_motion_corrupt(const std::string& input, const RunConfig& c) {
  const RobotModel m = load_model(c.model);
  const auto clips = detail::require_motions(input);
  std::vector<MotionClip> out;
  int events = 0;
  for (const auto& clip : clips) {
    CorruptionResult r = corrupt(clip, c.noise, m);
    events += static_cast<int>(r.log.size());
    out.push_back(std::move(r.clip));
  }
  std::vector<std::filesystem::path> written;
  if (detail::has_extension(c.output_dir, ".json")) {
    if (out.size() != 1) throw ConfigError("several clips need an output directory");
    save_clip(out.front(), c.output_dir);
    written.push_back(c.output_dir);
  } else {
    written = save_dataset(out, c.output_dir);
  }
  write_snapshot(detail::output_parent(c.output_dir, ".json"), "motion_corrupt", Json{{"input", input}}, c);
  log_info(strprintf("corrupted %zu clip(s), %d logged event(s)", out.size(), events));
  return written;
}

/// One line per clip: name, fps, frames, duration, joints, source and
/// whether it fits the configured model.
inline void cmd_motion_info(const std::string& input, const RunConfig& c, std::ostream& out) {
  const RobotModel m = load_model(c.model);
  const auto clips = detail::require_motions(input);
  out << "name\tfps\tframes\tduration_s\tjoints\tsource\tfits_" << m.name << "\n";
  for (const auto& clip : clips) {
    std::string fits = "yes";
    try {
      check_compatible(clip, m);
    } catch (const Error& e) {
      fits = std::string("no: ") + e.what();
    }
    out << clip.name << "\t" << strprintf("%g", clip.fps) << "\t" << clip.frames.size() << "\t"
        << strprintf("%.3f", clip.duration()) << "\t" << clip.joint_names.size() << "\t"
        << clip.provenance.value("source", "clean") << "\t" << fits << "\n";
  }
}

// ---------------------------------------------------------------------------
// training

namespace detail {

// Drops log records past `iteration` so a resumed run does not duplicate them.
inline void trim_log(const std::filesystem::path& path, int iteration) {
  std::ifstream in(path);
  if (!in) return;
  std::string kept, line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (Json::parse(line).value("iteration", 0) <= iteration) kept += line + "\n";
  }
  in.close();
  write_text_file(path, kept);
}

}  // namespace detail

inline PolicyCheckpoint cmd_train_teacher(const RunConfig& c, bool resume) {
  const RobotModel m = load_model(c.model);
  const auto clips = detail::require_motions(c.motions);
  TeacherTrainer trainer(make_env_spec(m, clips, c.env, c.reward, c.randomization), c.ppo);
  if (!c.probe_motions.empty())
    trainer.set_probe(make_env_spec(m, detail::require_motions(c.probe_motions), c.env, c.reward, c.randomization));
  const std::filesystem::path dir = c.output_dir;
  std::filesystem::create_directories(dir);
  if (resume) {
    const auto state = dir / "resume.json";
    if (!std::filesystem::exists(state)) throw DataError("nothing to resume: " + state.string() + " is missing");
    trainer.load_state(read_json_file(state));
    detail::trim_log(dir / "train_log.jsonl", trainer.iteration());
    log_info(strprintf("resuming at iteration %d (%lld samples)", trainer.iteration(), trainer.samples()));
  }
  write_snapshot(dir, "train_teacher", Json{{"resume", resume}}, c);
  log_info(strprintf("teacher: %zu motion(s), %d envs, budget %lld samples", clips.size(), c.ppo.num_envs,
                     c.ppo.total_samples));
  TrainOutput out{dir, [](const Json& r) {
                    std::string msg = strprintf("iter %d samples %lld reward %.2f tracking %.3f kl %.4f lr %.2e",
                                                r["iteration"].get<int>(), r["samples"].get<long long>(),
                                                r["reward"].get<double>(), r["tracking"].get<double>(),
                                                r["loss"]["kl"].get<double>(), r["loss"]["lr"].get<double>());
                    if (r.contains("probe_sr")) msg += strprintf(" probe_sr %.1f", r["probe_sr"].get<double>());
                    log_info(msg);
                  }};
  return train_teacher(trainer, out);
}

inline PolicyCheckpoint cmd_distill_student(const RunConfig& c) {
  if (c.teacher.empty()) throw ConfigError("no teacher checkpoint given (--teacher)");
  const PolicyCheckpoint teacher = load_checkpoint(c.teacher);
  const auto clips = detail::require_motions(c.motions);
  // The student shares the teacher's model and environment layout.
  StudentDistiller d(env_spec_for_checkpoint(teacher, clips, c.randomization, c.reward), teacher, c.dagger);
  const std::filesystem::path dir = c.output_dir;
  std::filesystem::create_directories(dir);
  write_snapshot(dir, "distill_student", Json::object(), c);
  log_info(strprintf("student: %zu motion(s), %d envs, budget %lld samples", clips.size(), c.dagger.num_envs,
                     c.dagger.total_samples));
  TrainOutput out{dir, [](const Json& r) {
                    log_info(strprintf("iter %d samples %lld loss %.5f tracking %.3f", r["iteration"].get<int>(),
                                       r["samples"].get<long long>(), r["loss"].get<double>(),
                                       r["tracking"].get<double>()));
                  }};
  return distill_student(d, c.dagger, out);
}

// ---------------------------------------------------------------------------
// evaluation

/// Evaluates a checkpoint (or "playback") on c.motions and writes
/// report.json / report.csv / report.tsv to the output directory. Nothing is
/// written when the dataset is empty.
inline EvalReport cmd_eval(const std::string& policy, const std::vector<std::string>& formats, const RunConfig& c,
                           std::ostream& out) {
  const auto clips = detail::require_motions(c.motions);
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "plot-data") throw ConfigError("unknown report format '" + f + "'");
  EvalReport report;
  if (policy == "playback") {
    const EnvSpec spec = make_env_spec(load_model(c.model), clips, c.env, c.reward, detail::eval_randomization(c));
    report = evaluate(spec, playback_policy(), c.eval, "playback", detail::dataset_id(clips));
  } else {
    const PolicyCheckpoint ckpt = load_checkpoint(policy);
    const EnvSpec spec = env_spec_for_checkpoint(ckpt, clips, detail::eval_randomization(c), c.reward);
    const std::string id = ckpt.role + ":" + hex64(fnv1a(checkpoint_to_json(ckpt).dump()));
    report = evaluate(spec, checkpoint_policy(ckpt), c.eval, id, detail::dataset_id(clips));
  }
  const std::filesystem::path dir = c.output_dir;
  std::filesystem::create_directories(dir);
  for (const auto& f : formats) {
    const char* name = f == "json" ? "report.json" : f == "csv" ? "report.csv" : "report.tsv";
    emit_report(report, dir / name, f);
  }
  write_snapshot(dir, "eval", Json{{"policy", policy}, {"formats", formats}}, c);
  out << report_summary(report);
  return report;
}

// ---------------------------------------------------------------------------
// simulation

struct RolloutArgs {
  std::string policy = "playback";
  int motion = 0;  // index into c.motions
  bool terminate = true;
};

/// Runs one motion and writes the JSON-lines trajectory dump: one record for
/// the reset state and one per control step.
inline std::filesystem::path cmd_sim_rollout(const RolloutArgs& a, const RunConfig& c, std::ostream& out) {
  const auto clips = detail::require_motions(c.motions);
  if (a.motion < 0 || a.motion >= static_cast<int>(clips.size()))
    throw ConfigError(strprintf("--motion-index %d out of range (%zu motions)", a.motion, clips.size()));
  std::optional<PolicyCheckpoint> ckpt;
  EnvSpec spec;
  if (a.policy == "playback") {
    spec = make_env_spec(load_model(c.model), clips, c.env, c.reward, detail::eval_randomization(c));
  } else {
    ckpt = load_checkpoint(a.policy);
    spec = env_spec_for_checkpoint(*ckpt, clips, detail::eval_randomization(c), c.reward);
  }
  spec.env.terminate = a.terminate;
  spec.env.resample_on_motion_end = false;
  spec.env.random_start = false;
  spec.env.max_episode_steps = std::numeric_limits<int>::max();
  const StepFn step = ckpt ? checkpoint_policy(*ckpt) : playback_policy();

  const std::filesystem::path path = detail::has_extension(c.output_dir, ".jsonl")
                                         ? std::filesystem::path(c.output_dir)
                                         : std::filesystem::path(c.output_dir) / "rollout.jsonl";
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream dump(path, std::ios::binary);
  if (!dump) throw DataError("cannot write " + path.string());

  TrackingEnv env(spec, c.seed);
  env.set_auto_reset(false);
  env.reset(a.motion);
  auto record = [&](int k, const EnvStep* s) {
    const SimState& st = env.state();
    Json forces = Json::array();
    for (const auto& f : st.contact_forces) forces.push_back(vec3_to_json(f));
    Json r = {{"step", k},
              {"time", st.time},
              {"base_position", vec3_to_json(st.base_position)},
              {"base_orientation", quat_to_json(st.base_orientation)},
              {"q", vec_to_json(st.q)},
              {"qd", vec_to_json(st.qd)},
              {"torques", vec_to_json(env.last_torques())},
              {"contact_forces", forces}};
    if (s) {
      r["reward"] = s->reward.total;
      r["tracking"] = tracking_fraction(s->reward, spec.reward);
      if (s->done()) r["end"] = s->reason;
    }
    dump << r.dump() << "\n";
  };
  record(0, nullptr);
  const int steps = env.track().num_frames() - 1;
  int k = 1;
  double tracking = 0.0;
  EnvStep s;
  for (; k <= steps; ++k) {
    s = step(env);
    tracking += tracking_fraction(s.reward, spec.reward);
    record(k, &s);
    if (s.done()) break;
  }
  const int taken = std::min(k, steps);
  write_snapshot(detail::output_parent(c.output_dir, ".jsonl"), "sim_rollout",
                 Json{{"policy", a.policy}, {"motion", a.motion}, {"terminate", a.terminate}}, c);
  out << "motion\t" << spec.motion_names[a.motion] << "\n"
      << "steps\t" << taken << "\n"
      << "terminated\t" << (s.terminated ? s.reason : std::string("no")) << "\n"
      << strprintf("mean_tracking\t%.6f\n", taken > 0 ? tracking / taken : 0.0);
  return path;
}

}  // namespace symmimic
