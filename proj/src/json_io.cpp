#include "mics/json_io.hpp"

#include <fstream>
#include <sstream>

#include "mics/error.hpp"

namespace mics {

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json distribution_json(const EmpiricalDistribution& dist) {
  const auto s = dist.sorted_samples();
  return Json{{"task_label", dist.task_label()},
              {"n", dist.n()},
              {"wcet_hi_us", dist.wcet_hi()},
              {"sorted_samples_us", std::vector<Micros>(s.begin(), s.end())}};
}

Json levels_json(const WcetLevels& levels, const std::string& task_label) {
  return Json{{"task_label", task_label},
              {"wcet_hi_us", levels.wcet_hi},
              {"levels_us", levels.levels},
              {"coverage", levels.coverage},
              {"p_ovrun", levels.p_ovrun}};
}

Json anti_mics_json(const AntiMicsResult& result, const EmpiricalDistribution& dist) {
  return Json{{"task_label", dist.task_label()},
              {"n", dist.n()},
              {"wcet_hi_us", dist.wcet_hi()},
              {"wcet_lo_us", result.wcet_lo},
              {"p_ovrun", result.p_ovrun},
              {"eet_min_us", result.eet_min},
              {"mean_us", dist.mean()},
              {"stddev_us", dist.stddev()}};
}

Json design_report_json(const DesignReport& r) {
  return Json{{"policy", r.policy.name()},
              {"u_hc_lo", r.u_hc_lo},
              {"u_hc_hi", r.u_hc_hi},
              {"u_lc_lo", r.u_lc_lo},
              {"u_lc_lo_max", r.u_lc_lo_max},
              {"p_ms_sys", r.p_ms_sys},
              {"system_goal", r.system_goal},
              {"edfvd_schedulable", r.edfvd_schedulable},
              {"virtual_deadline_factor_x", r.virtual_deadline_factor_x}};
}

Json sim_metrics_json(const SimMetrics& m) {
  return Json{{"qos", m.qos},
              {"util_waste", m.util_waste},
              {"mode_switches_per_hyperperiod", m.mode_switches_per_hyperperiod},
              {"mode_switches", m.mode_switches},
              {"hc_deadline_misses", m.hc_deadline_misses},
              {"hc_jobs_released", m.hc_jobs_released},
              {"hc_jobs_completed", m.hc_jobs_completed},
              {"lc_deadline_misses", m.lc_deadline_misses},
              {"lc_jobs_nominal", m.lc_jobs_nominal},
              {"lc_jobs_released", m.lc_jobs_released},
              {"lc_jobs_completed", m.lc_jobs_completed},
              {"lc_jobs_dropped", m.lc_jobs_dropped},
              {"lc_jobs_revoked", m.lc_jobs_revoked},
              {"level_changes", m.level_changes},
              {"trace_wraps", m.trace_wraps},
              {"per_mode_time", {{"lo_us", m.time_lo}, {"hi_us", m.time_hi}}},
              {"horizon_us", m.horizon_us},
              {"hyperperiod_us", m.hyperperiod_us},
              {"end_time_us", m.end_time},
              {"virtual_deadline_factor_x", m.x},
              {"unverified", m.unverified}};
}

Json sweep_json(const SweepResult& result) {
  Json points = Json::array();
  for (const auto& p : result.points) {
    points.push_back({{"u_bound", p.u_bound},
                      {"policy", p.policy},
                      {"acceptance_ratio", p.acceptance_ratio},
                      {"sets", p.sets}});
  }
  return Json{{"points", points}};
}

namespace {

// Field access that reports schema problems as input errors.
template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(0, where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(0, where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, where);
}

Criticality parse_criticality(const std::string& s, const std::string& where) {
  if (s == "HC") return Criticality::HC;
  if (s == "LC") return Criticality::LC;
  throw ParseError(0, where + ": criticality must be HC or LC");
}

}  // namespace

Json regime_model_json(const RegimeModelSpec& spec) {
  Json regimes = Json::array();
  for (const auto& r : spec.regimes) {
    Json comps = Json::array();
    for (const auto& c : r.components) {
      comps.push_back({{"weight", c.weight}, {"mean_us", c.mean_us}, {"sd_us", c.sd_us}});
    }
    regimes.push_back({{"components", comps}, {"lo_us", r.lo_us}, {"hi_us", r.hi_us}});
  }
  return Json{{"regimes", regimes}, {"transition", spec.transition}, {"initial", spec.initial}};
}

RegimeModelSpec regime_model_from_json(const Json& j) {
  const std::string where = "exec_model";
  RegimeModelSpec spec;
  for (const auto& r : field<std::vector<Json>>(j, "regimes", where)) {
    Regime regime;
    for (const auto& c : field<std::vector<Json>>(r, "components", where)) {
      regime.components.push_back({field_or<double>(c, "weight", 1.0, where),
                                   field<double>(c, "mean_us", where),
                                   field_or<double>(c, "sd_us", 0.0, where)});
    }
    regime.lo_us = field_or<Micros>(r, "lo_us", 1, where);
    regime.hi_us = field_or<Micros>(r, "hi_us", 0, where);
    spec.regimes.push_back(std::move(regime));
  }
  spec.transition = field_or<std::vector<std::vector<double>>>(j, "transition", {}, where);
  spec.initial = field_or<std::size_t>(j, "initial", 0, where);
  spec.validate();
  return spec;
}

Json gen_spec_json(const GenSpec& s) {
  Json mixture = Json::array();
  for (const auto& c : s.effective_mixture()) {
    mixture.push_back({{"weight", c.weight}, {"mean_frac", c.mean_frac}, {"sd_frac", c.sd_frac}});
  }
  return Json{{"u_bound_targets", s.u_bound_targets},
              {"sets_per_point", s.sets_per_point},
              {"wcet_hi_range_us", {s.wcet_hi_min, s.wcet_hi_max}},
              {"hc_probability", s.hc_probability},
              {"per_task_util_range", {s.util_min, s.util_max}},
              {"distribution_shape", std::string(to_string(s.shape))},
              {"mixture", mixture},
              {"samples_per_task", s.samples_per_task},
              {"seed", s.seed},
              {"gamma", s.gamma},
              {"period_choices_us", s.period_choices},
              {"min_util_gain", s.min_util_gain},
              {"max_levels", s.max_levels}};
}

GenSpec gen_spec_from_json(const Json& j) {
  const std::string where = "genspec";
  if (!j.is_object()) throw ParseError(0, where + ": expected an object");
  GenSpec s;
  s.u_bound_targets = field_or(j, "u_bound_targets", s.u_bound_targets, where);
  s.sets_per_point = field_or(j, "sets_per_point", s.sets_per_point, where);
  if (j.contains("wcet_hi_range_us")) {
    const auto r = field<std::vector<Micros>>(j, "wcet_hi_range_us", where);
    if (r.size() != 2) throw ParseError(0, where + ": wcet_hi_range_us needs two values");
    s.wcet_hi_min = r[0];
    s.wcet_hi_max = r[1];
  }
  s.hc_probability = field_or(j, "hc_probability", s.hc_probability, where);
  if (j.contains("per_task_util_range")) {
    const auto r = field<std::vector<double>>(j, "per_task_util_range", where);
    if (r.size() != 2) throw ParseError(0, where + ": per_task_util_range needs two values");
    s.util_min = r[0];
    s.util_max = r[1];
  }
  if (j.contains("distribution_shape")) {
    s.shape = parse_distribution_shape(field<std::string>(j, "distribution_shape", where));
  }
  if (j.contains("mixture")) {
    for (const auto& c : field<std::vector<Json>>(j, "mixture", where)) {
      s.mixture.push_back({field_or<double>(c, "weight", 1.0, where), field<double>(c, "mean_frac", where),
                           field<double>(c, "sd_frac", where)});
    }
  }
  s.samples_per_task = field_or(j, "samples_per_task", s.samples_per_task, where);
  s.seed = field_or(j, "seed", s.seed, where);
  s.gamma = field_or(j, "gamma", s.gamma, where);
  s.period_choices = field_or(j, "period_choices_us", s.period_choices, where);
  s.min_util_gain = field_or(j, "min_util_gain", s.min_util_gain, where);
  s.max_levels = field_or(j, "max_levels", s.max_levels, where);
  s.validate();
  return s;
}

LoadedTaskSet taskset_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError(0, "taskset: expected an object");
  LoadedTaskSet out;
  out.set.gamma = field_or<double>(j, "gamma", 0.0, "taskset");
  for (const auto& tj : field<std::vector<Json>>(j, "tasks", "taskset")) {
    const std::string id = field<std::string>(tj, "id", "task");
    const std::string where = "task '" + id + "'";
    const Criticality crit = parse_criticality(field<std::string>(tj, "criticality", where), where);
    const auto period = field<Micros>(tj, "period_us", where);
    const auto hi = field<Micros>(tj, "wcet_hi_us", where);
    if (tj.contains("deadline_us") && field<Micros>(tj, "deadline_us", where) != period) {
      throw ConfigError(where + ": deadline must equal period");
    }

    std::shared_ptr<const ExecutionTrace> trace;
    std::shared_ptr<const EmpiricalDistribution> dist;
    if (tj.contains("trace_path")) {
      const std::filesystem::path p = base_dir / field<std::string>(tj, "trace_path", where);
      trace = std::make_shared<const ExecutionTrace>(load_trace(p));
      dist = std::make_shared<const EmpiricalDistribution>(*trace, hi);
      out.trace_files.push_back(p);
    }

    McTask task;
    if (crit == Criticality::HC) {
      WcetLevels levels;
      levels.wcet_hi = hi;
      levels.levels = field<std::vector<Micros>>(tj, "wcet_levels_us", where);
      levels.coverage = field_or<std::vector<double>>(tj, "coverage", {}, where);
      if (tj.contains("p_ovrun")) {
        levels.p_ovrun = field<double>(tj, "p_ovrun", where);
      } else if (dist && !levels.levels.empty()) {
        levels.p_ovrun = overrun_fraction(*dist, levels.levels.front());
      }
      task = make_hc_task(id, period, hi, std::move(levels));
    } else {
      if (tj.contains("wcet_levels_us")) {
        const auto lv = field<std::vector<Micros>>(tj, "wcet_levels_us", where);
        if (lv.size() != 1 || lv[0] != hi) {
          throw ConfigError(where + ": LC tasks carry a single budget equal to wcet_hi_us");
        }
      }
      task = make_lc_task(id, period, hi);
    }
    task.trace = trace;
    task.distribution = dist;
    if (tj.contains("exec_model")) out.exec_models[id] = regime_model_from_json(tj.at("exec_model"));
    out.set.tasks.push_back(std::move(task));
  }
  out.set.validate();
  return out;
}

LoadedTaskSet load_taskset(const std::filesystem::path& path) {
  return taskset_from_json(read_json_file(path), path.parent_path());
}

Json taskset_json(const McTaskSet& set, const std::map<std::string, std::string>& trace_paths,
                  const std::map<std::string, RegimeModelSpec>& exec_models) {
  Json tasks = Json::array();
  for (const auto& t : set.tasks) {
    Json tj{{"id", t.id},
            {"criticality", std::string(to_string(t.criticality))},
            {"period_us", t.period},
            {"wcet_hi_us", t.wcet_hi},
            {"wcet_levels_us", t.levels.levels}};
    if (t.is_hc()) {
      if (!t.levels.coverage.empty()) tj["coverage"] = t.levels.coverage;
      tj["p_ovrun"] = t.levels.p_ovrun;
    }
    if (auto it = trace_paths.find(t.id); it != trace_paths.end()) tj["trace_path"] = it->second;
    if (auto it = exec_models.find(t.id); it != exec_models.end()) {
      tj["exec_model"] = regime_model_json(it->second);
    }
    tasks.push_back(std::move(tj));
  }
  return Json{{"format", "taskset-v1"}, {"gamma", set.gamma}, {"tasks", tasks}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

}  // namespace mics
