#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symmimic/core/parallel.hpp"
#include "symmimic/eval/rollout.hpp"

namespace symmimic {

struct EvalConfig {
  int rollouts_per_motion = 16;
  bool terminate = true;  // also run the terminated pass (SR, MPKPE, LMPKPE)
  double deviation_threshold = 0.5;
  std::uint64_t seed = 0;
  bool randomization = true;
  int threads = 0;  // 0: default_thread_count()
};

inline void validate(const EvalConfig& c) {
  if (c.rollouts_per_motion < 1) throw ConfigError("eval.rollouts_per_motion must be >= 1");
  if (!(c.deviation_threshold > 0.0)) throw ConfigError("eval.deviation_threshold must be positive");
  if (c.threads < 0) throw ConfigError("eval.threads must be >= 0");
}

inline Json to_json(const EvalConfig& c) {
  return {{"rollouts_per_motion", c.rollouts_per_motion}, {"terminate", c.terminate},
          {"deviation_threshold", c.deviation_threshold}, {"seed", c.seed},
          {"randomization", c.randomization},             {"threads", c.threads}};
}

inline EvalConfig eval_config_from_json(const Json& j, EvalConfig c = {}) {
  check_keys(j, {"rollouts_per_motion", "terminate", "deviation_threshold", "seed", "randomization", "threads"},
             "eval");
  read_opt(j, "rollouts_per_motion", c.rollouts_per_motion);
  read_opt(j, "terminate", c.terminate);
  read_opt(j, "deviation_threshold", c.deviation_threshold);
  read_opt(j, "seed", c.seed);
  read_opt(j, "randomization", c.randomization);
  read_opt(j, "threads", c.threads);
  validate(c);
  return c;
}

struct MotionMetrics {
  std::string name;
  std::optional<double> sr, mpkpe, lmpkpe;  // terminated pass
  double mpkpe_nt = 0.0, lmpkpe_nt = 0.0;
  std::map<std::string, int> terminations;  // reason -> count, terminated pass
  std::vector<double> frame_error_nt;        // mean over rollouts, cm
  std::vector<double> frame_local_error_nt;
};

struct EvalReport {
  std::string policy_id;
  std::string dataset_id;
  EvalConfig config;
  std::string config_hash;
  std::vector<MotionMetrics> motions;
};

/// Mean over motions (population std); SR in percent, errors in cm.
struct Aggregate {
  std::optional<MeanStd> sr, mpkpe, lmpkpe;
  MeanStd mpkpe_nt, lmpkpe_nt;
};

inline Aggregate aggregate(const std::vector<MotionMetrics>& motions) {
  if (motions.empty()) throw DataError("no motions evaluated");
  Aggregate a;
  auto collect = [&](auto get) {
    std::vector<double> v;
    for (const auto& m : motions) v.push_back(get(m));
    return mean_std(v);
  };
  a.mpkpe_nt = collect([](const MotionMetrics& m) { return m.mpkpe_nt; });
  a.lmpkpe_nt = collect([](const MotionMetrics& m) { return m.lmpkpe_nt; });
  if (motions.front().sr) {
    a.sr = collect([](const MotionMetrics& m) { return *m.sr; });
    a.mpkpe = collect([](const MotionMetrics& m) { return *m.mpkpe; });
    a.lmpkpe = collect([](const MotionMetrics& m) { return *m.lmpkpe; });
  }
  return a;
}

/// Metrics of one motion from its rollouts.
inline MotionMetrics motion_metrics(const std::string& name, const std::vector<TrajectoryRecord>& with_term,
                                    const std::vector<TrajectoryRecord>& no_term) {
  MotionMetrics m;
  m.name = name;
  auto avg = [](const std::vector<TrajectoryRecord>& rs, double (*f)(const TrajectoryRecord&)) {
    double s = 0.0;
    for (const auto& r : rs) s += f(r);
    return s / static_cast<double>(rs.size());
  };
  if (!with_term.empty()) {
    m.sr = success_rate(with_term);
    m.mpkpe = avg(with_term, mpkpe);
    m.lmpkpe = avg(with_term, lmpkpe);
    for (const auto& r : with_term)
      if (r.terminated) ++m.terminations[r.reason];
  }
  if (no_term.empty()) throw ValidationError("motion metrics need rollouts without termination");
  m.mpkpe_nt = avg(no_term, mpkpe_nt);
  m.lmpkpe_nt = avg(no_term, lmpkpe_nt);
  std::size_t len = 0;
  for (const auto& r : no_term) len = std::max(len, r.robot.size());
  m.frame_error_nt.assign(len, 0.0);
  m.frame_local_error_nt.assign(len, 0.0);
  std::vector<int> count(len, 0);
  for (const auto& r : no_term) {
    const auto g = frame_errors_cm(r, false);
    const auto l = frame_errors_cm(r, true);
    for (std::size_t f = 0; f < g.size(); ++f) {
      m.frame_error_nt[f] += g[f];
      m.frame_local_error_nt[f] += l[f];
      ++count[f];
    }
  }
  for (std::size_t f = 0; f < len; ++f) {
    m.frame_error_nt[f] /= count[f];
    m.frame_local_error_nt[f] /= count[f];
  }
  return m;
}

/// Evaluates `policy` on every motion of `spec`. Rollout seeds depend only on
/// (config seed, motion, rollout index), so results do not depend on the
/// thread count.
inline EvalReport evaluate(const EnvSpec& spec, const StepFn& policy, const EvalConfig& config,
                           const std::string& policy_id, const std::string& dataset_id) {
  validate(config);
  const int motions = static_cast<int>(spec.motions->size());
  if (motions == 0) throw DataError("evaluation needs at least one motion");
  EnvSpec s = spec;
  s.env.termination_distance = config.deviation_threshold;
  const int R = config.rollouts_per_motion;
  const int passes = config.terminate ? 2 : 1;
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(motions) * R * passes);
  const int threads = config.threads > 0 ? config.threads : default_thread_count();
  parallel_for(static_cast<int>(records.size()), threads, [&](int i) {
    const int pass = i / (motions * R);
    const int motion = (i / R) % motions;
    const int r = i % R;
    const bool terminate = passes == 2 && pass == 1;
    const std::uint64_t seed = mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(motion)), r);
    records[i] = rollout(s, motion, policy, terminate, seed);
  });
  EvalReport rep;
  rep.policy_id = policy_id;
  rep.dataset_id = dataset_id;
  rep.config = config;
  Json cfg = {{"eval", to_json(config)}, {"env", to_json(s.env)}, {"randomization", to_json(s.randomization)}};
  cfg["eval"].erase("threads");
  rep.config_hash = hex64(fnv1a(cfg.dump()));
  for (int m = 0; m < motions; ++m) {
    auto slice = [&](int pass) {
      const auto first = records.begin() + (static_cast<std::ptrdiff_t>(pass) * motions + m) * R;
      return std::vector<TrajectoryRecord>(first, first + R);
    };
    rep.motions.push_back(motion_metrics(spec.motion_names[m], passes == 2 ? slice(1) : std::vector<TrajectoryRecord>{},
                                         slice(0)));
  }
  return rep;
}

inline constexpr const char* kReportSchema = "symmimic-eval-report";
inline constexpr int kReportVersion = 1;

inline OrderedJson report_to_json(const EvalReport& r) {
  auto ms = [](const MeanStd& m) { return OrderedJson{{"mean", m.mean}, {"std", m.std}}; };
  auto opt = [](const std::optional<double>& v) { return v ? OrderedJson(*v) : OrderedJson(nullptr); };
  const Aggregate a = aggregate(r.motions);
  OrderedJson j;
  j["schema"] = kReportSchema;
  j["version"] = kReportVersion;
  j["metadata"] = {{"policy_id", r.policy_id},
                   {"dataset_id", r.dataset_id},
                   {"seed", r.config.seed},
                   {"rollouts_per_motion", r.config.rollouts_per_motion},
                   {"randomization", r.config.randomization},
                   {"terminate", r.config.terminate},
                   {"deviation_threshold", r.config.deviation_threshold},
                   {"config_hash", r.config_hash}};
  OrderedJson agg;
  agg["num_motions"] = r.motions.size();
  agg["sr"] = a.sr ? ms(*a.sr) : OrderedJson(nullptr);
  agg["mpkpe"] = a.mpkpe ? ms(*a.mpkpe) : OrderedJson(nullptr);
  agg["lmpkpe"] = a.lmpkpe ? ms(*a.lmpkpe) : OrderedJson(nullptr);
  agg["mpkpe_nt"] = ms(a.mpkpe_nt);
  agg["lmpkpe_nt"] = ms(a.lmpkpe_nt);
  j["aggregate"] = agg;
  OrderedJson motions = OrderedJson::array();
  for (const auto& m : r.motions) {
    OrderedJson e;
    e["name"] = m.name;
    e["sr"] = opt(m.sr);
    e["mpkpe"] = opt(m.mpkpe);
    e["lmpkpe"] = opt(m.lmpkpe);
    e["mpkpe_nt"] = m.mpkpe_nt;
    e["lmpkpe_nt"] = m.lmpkpe_nt;
    OrderedJson t = OrderedJson::object();
    for (const auto& [k, v] : m.terminations) t[k] = v;
    e["terminations"] = t;
    motions.push_back(e);
  }
  j["motions"] = motions;
  return j;
}

/// Checks the structure of a report document; throws DataError.
inline void validate_report_json(const Json& j) {
  auto need = [](const Json& o, const char* k) -> const Json& {
    if (!o.is_object() || !o.contains(k)) throw DataError(std::string("report: missing '") + k + "'");
    return o.at(k);
  };
  if (need(j, "schema") != kReportSchema || need(j, "version") != kReportVersion)
    throw DataError("report: unknown schema or version");
  for (const char* k : {"policy_id", "dataset_id", "seed", "rollouts_per_motion", "config_hash"})
    need(need(j, "metadata"), k);
  const Json& agg = need(j, "aggregate");
  for (const char* k : {"sr", "mpkpe", "lmpkpe", "mpkpe_nt", "lmpkpe_nt"}) {
    const Json& v = need(agg, k);
    if (!v.is_null() && (!v.contains("mean") || !v.contains("std"))) throw DataError("report: bad aggregate entry");
  }
  const Json& ms = need(j, "motions");
  if (!ms.is_array() || ms.size() != need(agg, "num_motions").get<std::size_t>())
    throw DataError("report: motion count mismatch");
  for (const auto& m : ms) {
    for (const char* k : {"name", "sr", "mpkpe", "lmpkpe", "mpkpe_nt", "lmpkpe_nt", "terminations"}) need(m, k);
    if (!m.at("sr").is_null() && (m.at("sr").get<double>() < 0.0 || m.at("sr").get<double>() > 100.0))
      throw DataError("report: SR out of range");
  }
}

namespace detail {
inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
}  // namespace detail

/// One row per motion.
inline std::string report_csv(const EvalReport& r) {
  std::string s = "motion,sr,mpkpe,lmpkpe,mpkpe_nt,lmpkpe_nt\n";
  for (const auto& m : r.motions)
    s += m.name + "," + detail::num(m.sr) + "," + detail::num(m.mpkpe) + "," + detail::num(m.lmpkpe) + "," +
         detail::num(m.mpkpe_nt) + "," + detail::num(m.lmpkpe_nt) + "\n";
  return s;
}

/// Per-frame error series of the no-termination pass, tab separated.
inline std::string report_plot_data(const EvalReport& r) {
  std::string s = "motion\tframe\terror_cm\tlocal_error_cm\n";
  for (const auto& m : r.motions)
    for (std::size_t f = 0; f < m.frame_error_nt.size(); ++f)
      s += m.name + "\t" + std::to_string(f) + "\t" + detail::num(m.frame_error_nt[f]) + "\t" +
           detail::num(m.frame_local_error_nt[f]) + "\n";
  return s;
}

/// Summary table in the usual column order.
inline std::string report_summary(const EvalReport& r) {
  const Aggregate a = aggregate(r.motions);
  auto cell = [](const std::optional<MeanStd>& m) {
    if (!m) return std::string("-");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f +- %.2f", m->mean, m->std);
    return std::string(buf);
  };
  std::string s = "SR(%)\tMPKPE(cm)\tLMPKPE(cm)\tMPKPE-NT(cm)\tLMPKPE-NT(cm)\n";
  char sr[32] = "-";
  if (a.sr) std::snprintf(sr, sizeof sr, "%.2f", a.sr->mean);
  s += std::string(sr) + "\t" + cell(a.mpkpe) + "\t" + cell(a.lmpkpe) + "\t" + cell(a.mpkpe_nt) + "\t" +
       cell(a.lmpkpe_nt) + "\n";
  return s;
}

/// Writes the report in `format` (json | csv | plot-data) to `path`.
inline void emit_report(const EvalReport& r, const std::filesystem::path& path, const std::string& format) {
  if (format == "json") write_text_file(path, report_to_json(r).dump(2) + "\n");
  else if (format == "csv") write_text_file(path, report_csv(r));
  else if (format == "plot-data") write_text_file(path, report_plot_data(r));
  else throw ConfigError("unknown report format '" + format + "' (json, csv, plot-data)");
}

}  // namespace symmimic
