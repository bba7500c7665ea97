#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "symmimic/cli/commands.hpp"
#include "test_support.hpp"

using namespace symmimic;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small networks and batches so full commands finish in seconds.
RunConfig tiny_config(const fs::path& out) {
  RunConfig c;
  c.output_dir = out.string();
  c.log_level = "error";
  c.ppo.num_envs = 4;
  c.ppo.steps_per_env = 8;
  c.ppo.actor_hidden = c.ppo.critic_hidden = {16};
  c.ppo.total_samples = 64;
  c.ppo.checkpoint_interval = 1;
  c.dagger.num_envs = 4;
  c.dagger.steps_per_env = 4;
  c.dagger.hidden = {16};
  c.dagger.total_samples = 32;
  c.eval.rollouts_per_motion = 2;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SYMMIMIC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ParseDuration) {
  EXPECT_EQ(parse_duration("2s"), 2.0);
  EXPECT_EQ(parse_duration("2.5"), 2.5);
  EXPECT_EQ(parse_duration("1500ms"), 1.5);
  EXPECT_THROW(parse_duration("2h"), ConfigError);
  EXPECT_THROW(parse_duration("fast"), ConfigError);
  EXPECT_THROW(parse_duration("0s"), ConfigError);
}

TEST(Cli, RunConfigResolution) {
  EXPECT_THROW(run_config_from_json(Json{{"sede", 1}}), ConfigError);
  EXPECT_THROW(run_config_from_json(Json{{"ppo", {{"gama", 0.9}}}}), ConfigError);
  EXPECT_THROW(run_config_from_json(Json{{"eval", {{"seed", 3}}}}), ConfigError);
  const RunConfig file = run_config_from_json(Json{{"seed", 5}, {"threads", 2}, {"ppo", {{"num_envs", 8}}}});
  ConfigOverrides o;
  o.seed = 9;
  const RunConfig c = resolve(file, o);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.ppo.seed, 9u);
  EXPECT_EQ(c.dagger.seed, 9u);
  EXPECT_EQ(c.eval.seed, 9u);
  EXPECT_EQ(c.noise.seed, 9u);
  EXPECT_EQ(c.ppo.threads, 2);
  EXPECT_EQ(c.ppo.num_envs, 8);
  EXPECT_EQ(resolve(file).seed, 5u);
  // The snapshot's config section is itself a valid run config.
  const auto dir = symmimic::testing::scratch_dir("cli_snapshot");
  const auto path = write_snapshot(dir, "x", Json::object(), c);
  const Json snap = read_json_file(path);
  EXPECT_EQ(to_json(resolve(run_config_from_json(snap.at("config")))).dump(), to_json(c).dump());
  o.log_level = "loud";
  EXPECT_THROW(resolve(file, o), ConfigError);
}

TEST(Cli, ShippedConfigsLoad) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(SYMMIMIC_CONFIG_DIR)) {
    const Json j = read_json_file(e.path());
    if (j.contains("keypoint_noise_std"))
      EXPECT_NO_THROW(noise_spec_from_json(j)) << e.path();
    else
      EXPECT_NO_THROW(resolve(run_config_from_json(j))) << e.path();
    ++n;
  }
  EXPECT_GE(n, 3);
}

TEST(Cli, MotionGenStandTwoSeconds) {
  const auto dir = symmimic::testing::scratch_dir("cli_gen");
  RunConfig c = resolve(tiny_config(dir / "stand.json"));
  MotionGenArgs a;
  a.kind = "stand";
  a.duration = "2s";
  const auto files = cmd_motion_gen(a, c);
  ASSERT_EQ(files.size(), 1u);
  const MotionClip clip = load_clip(files[0]);
  EXPECT_EQ(clip.frames.size(), 101u);
  EXPECT_NO_THROW(check_compatible(clip, make_mini_humanoid()));
  EXPECT_TRUE(fs::exists(dir / "motion_gen.resolved.json"));
  // The snapshot next to the clip is not mistaken for a motion.
  EXPECT_EQ(load_dataset(dir).size(), 1u);
}

TEST(Cli, EvalWithoutMotionsIsDataErrorAndWritesNothing) {
  const auto dir = symmimic::testing::scratch_dir("cli_eval_empty");
  fs::create_directories(dir / "empty");
  RunConfig c = tiny_config(dir / "report");
  c.motions = (dir / "empty").string();
  std::ostringstream out;
  EXPECT_THROW(cmd_eval("playback", {"json"}, resolve(c), out), DataError);
  EXPECT_FALSE(fs::exists(dir / "report"));
  EXPECT_EQ(run_cli("eval --policy playback --motions " + (dir / "empty").string() + " --out " +
                    (dir / "report").string()),
            kExitData);
  EXPECT_FALSE(fs::exists(dir / "report"));
}

TEST(Cli, ExitCodes) {
  const auto dir = symmimic::testing::scratch_dir("cli_exit");
  EXPECT_EQ(run_cli("model validate mini-humanoid"), kExitOk);
  EXPECT_EQ(run_cli("model validate " + (dir / "missing.json").string()), kExitData);
  EXPECT_EQ(run_cli("motion gen stand 2s --no-such-flag"), kExitConfig);
  EXPECT_EQ(run_cli("motion gen stand 2x --out " + (dir / "a.json").string()), kExitConfig);
  write_text_file(dir / "bad.json", "{\"ppo\": {\"clip\": -1}}");
  EXPECT_EQ(run_cli("--config " + (dir / "bad.json").string() + " motion info x"), kExitConfig);
  write_text_file(dir / "broken_clip.json", "{\"name\": 1");
  EXPECT_EQ(run_cli("motion info " + (dir / "broken_clip.json").string()), kExitData);
}

TEST(Cli, ZeroBudgetTeacherIsEvaluable) {
  const auto dir = symmimic::testing::scratch_dir("cli_teacher0");
  RunConfig c = tiny_config(dir / "motions");
  MotionGenArgs a;
  a.kind = "wave";
  a.duration = "1s";
  cmd_motion_gen(a, resolve(c));
  c.motions = (dir / "motions").string();
  c.output_dir = (dir / "teacher").string();
  c.ppo.total_samples = 0;
  cmd_train_teacher(resolve(c), false);
  ASSERT_TRUE(fs::exists(dir / "teacher" / "teacher.json"));
  c.output_dir = (dir / "eval").string();
  std::ostringstream out;
  const EvalReport r = cmd_eval((dir / "teacher" / "teacher.json").string(), {"json"}, resolve(c), out);
  EXPECT_EQ(r.motions.size(), 1u);
  EXPECT_NO_THROW(validate_report_json(read_json_file(dir / "eval" / "report.json")));
  EXPECT_NE(out.str().find("SR(%)"), std::string::npos);
}

TEST(Cli, ResumedTrainingMatchesUninterrupted) {
  const auto dir = symmimic::testing::scratch_dir("cli_resume");
  RunConfig c = tiny_config(dir / "motions");
  MotionGenArgs a;
  a.kind = "dataset";
  a.duration = "1s";
  a.count = 2;
  cmd_motion_gen(a, resolve(c));
  c.motions = (dir / "motions").string();
  c.ppo.total_samples = 4 * 32;
  c.output_dir = (dir / "full").string();
  cmd_train_teacher(resolve(c), false);
  c.output_dir = (dir / "split").string();
  c.ppo.total_samples = 2 * 32;
  cmd_train_teacher(resolve(c), false);
  c.ppo.total_samples = 4 * 32;
  cmd_train_teacher(resolve(c), true);
  EXPECT_EQ(slurp(dir / "split" / "teacher.json"), slurp(dir / "full" / "teacher.json"));
  EXPECT_EQ(slurp(dir / "split" / "train_log.jsonl"), slurp(dir / "full" / "train_log.jsonl"));
  c.output_dir = (dir / "none").string();
  EXPECT_THROW(cmd_train_teacher(resolve(c), true), DataError);
}

TEST(Cli, SimRolloutDump) {
  const auto dir = symmimic::testing::scratch_dir("cli_rollout");
  RunConfig c = tiny_config(dir / "stand.json");
  MotionGenArgs a;
  a.duration = "1s";
  cmd_motion_gen(a, resolve(c));
  c.motions = (dir / "stand.json").string();
  c.output_dir = (dir / "roll.jsonl").string();
  std::ostringstream out;
  const auto path = cmd_sim_rollout(RolloutArgs{}, resolve(c), out);
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const Json r = Json::parse(line);
    for (const char* k : {"time", "base_position", "base_orientation", "q", "qd", "torques", "contact_forces"})
      EXPECT_TRUE(r.contains(k)) << k;
    EXPECT_EQ(r.at("step").get<int>(), n++);
  }
  EXPECT_EQ(n, 51);
  RolloutArgs bad;
  bad.motion = 3;
  EXPECT_THROW(cmd_sim_rollout(bad, resolve(c), out), ConfigError);
}

// gen -> corrupt -> train -> distill -> eval through the executable, twice
// with the same seed; the reports must match byte for byte.
TEST(Cli, PipelineRoundTripIsDeterministic) {
  const auto dir = symmimic::testing::scratch_dir("cli_pipeline");
  const Json cfg = {{"log_level", "error"},
                    {"ppo",
                     {{"num_envs", 4},
                      {"steps_per_env", 8},
                      {"actor_hidden", {16}},
                      {"critic_hidden", {16}},
                      {"total_samples", 64}}},
                    {"dagger", {{"num_envs", 4}, {"steps_per_env", 4}, {"hidden", {16}}, {"total_samples", 32}}},
                    {"eval", {{"rollouts_per_motion", 2}}}};
  write_text_file(dir / "run.json", cfg.dump());
  const std::string base = "--config " + (dir / "run.json").string() + " --seed 7 ";
  for (const std::string run : {"a", "b"}) {
    const fs::path r = dir / run;
    ASSERT_EQ(run_cli(base + "motion gen dataset 1s --count 3 --out " + (r / "clean").string()), kExitOk);
    ASSERT_EQ(run_cli(base + "motion corrupt " + (r / "clean").string() + " --keypoint-noise 0.02 --lr-swap 1 --out " +
                      (r / "noisy").string()),
              kExitOk);
    ASSERT_EQ(run_cli(base + "train teacher --motions " + (r / "noisy").string() + " --out " + (r / "teacher").string()),
              kExitOk);
    ASSERT_EQ(run_cli(base + "distill student --teacher " + (r / "teacher" / "teacher.json").string() +
                      " --motions " + (r / "noisy").string() + " --out " + (r / "student").string()),
              kExitOk);
    ASSERT_EQ(run_cli(base + "eval --policy " + (r / "student" / "student.json").string() + " --motions " +
                      (r / "clean").string() + " --format json --format csv --format plot-data --out " +
                      (r / "report").string()),
              kExitOk);
    EXPECT_NO_THROW(validate_report_json(read_json_file(r / "report" / "report.json")));
  }
  for (const char* f : {"report.json", "report.csv", "report.tsv"})
    EXPECT_EQ(slurp(dir / "a" / "report" / f), slurp(dir / "b" / "report" / f)) << f;
  const Json rep = read_json_file(dir / "a" / "report" / "report.json");
  EXPECT_EQ(rep.at("motions").size(), 3u);
  EXPECT_EQ(load_checkpoint(dir / "a" / "student" / "student.json").role, "student");
}
