// mics: command-line front end.
//
// Every command first resolves its flags into a config object, then runs from
// that object alone. The config is echoed into the output's manifest, which
// is what `mics rerun` replays.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mics/anti_mics.hpp"
#include "mics/error.hpp"
#include "mics/format.hpp"
#include "mics/json_io.hpp"
#include "mics/kernels.hpp"
#include "mics/manifest.hpp"
#include "mics/mc_model.hpp"
#include "mics/multi_mics.hpp"
#include "mics/seed.hpp"
#include "mics/simulator.hpp"
#include "mics/taskgen.hpp"
#include "mics/traces.hpp"

namespace fs = std::filesystem;
using namespace mics;

namespace {

struct Sinks {
  std::optional<fs::path> out;
  std::optional<fs::path> curve;
  std::optional<fs::path> events;
  std::optional<fs::path> manifest;
};

struct Artifacts {
  std::optional<Json> json;  // primary output when JSON
  std::string csv;           // primary output otherwise
  std::vector<std::pair<fs::path, std::string>> extra;
  std::vector<fs::path> inputs;
  std::uint64_t seed = 0;
  std::string summary;
};

std::string abs_path(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MICS_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError("MICS_SEED must be an unsigned integer");
    return v;
  }
  return fallback;
}

template <typename T>
T cfg(const Json& c, const char* key) {
  try {
    return c.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(0, std::string("config field '") + key + "' missing or malformed");
  }
}

const Json kGenerationNotes = {
    {"per_task_utilization", "uniform over per_task_util_range"},
    {"lc_utilization_in_bound", "LO (an LC task has a single budget, so LO and HI coincide)"},
    {"provisional_hc_level", "wcet_hi / 2 during generation, reassigned by the WCET policy"}};

// ---- analyze ---------------------------------------------------------------

Artifacts run_analyze(const Json& c, const Sinks& sinks) {
  const auto trace_path = cfg<std::string>(c, "trace");
  const ExecutionTrace trace =
      load_trace(trace_path, parse_trace_format(cfg<std::string>(c, "trace_format")));
  const EmpiricalDistribution dist(trace, cfg<Micros>(c, "wcet_hi_us"));
  ScanOptions scan;
  scan.uniform_grid = cfg<bool>(c.at("scan"), "uniform_grid");
  scan.scan_step = cfg<Micros>(c.at("scan"), "step_us");
  scan.keep_curve = sinks.curve.has_value();
  const AntiMicsResult r = derive_wcet_lo(dist, scan);

  Artifacts a;
  Json doc = anti_mics_json(r, dist);
  const double split = cfg<double>(c, "stability_split");
  const double threshold = cfg<double>(c, "stability_threshold");
  try {
    const double dev = stability_check(trace, split);
    doc["stability"] = {{"split", split}, {"max_ecdf_deviation", dev}, {"threshold", threshold},
                        {"sufficient", dev <= threshold}};
  } catch (const TooFewSamples&) {
    doc["stability"] = nullptr;
  }
  a.json = doc;
  if (sinks.curve) a.extra.emplace_back(*sinks.curve, eet_curve_csv(r));
  a.inputs.push_back(trace_path);
  a.summary = trace.task_label + ": WCET^LO = " + std::to_string(r.wcet_lo) +
              " us, p_ovrun = " + format_double(r.p_ovrun);
  return a;
}

// ---- levels ----------------------------------------------------------------

Artifacts run_levels(const Json& c, const Sinks&) {
  const auto trace_path = cfg<std::string>(c, "trace");
  const ExecutionTrace trace =
      load_trace(trace_path, parse_trace_format(cfg<std::string>(c, "trace_format")));
  const EmpiricalDistribution dist(trace, cfg<Micros>(c, "wcet_hi_us"));
  LevelOptions opts;
  opts.period = cfg<Micros>(c, "period_us");
  opts.min_util_gain = cfg<double>(c, "min_gain");
  opts.max_levels = cfg<std::size_t>(c, "max_levels");
  const WcetLevels levels = derive_levels(dist, opts);

  Artifacts a;
  a.json = levels_json(levels, dist.task_label());
  a.inputs.push_back(trace_path);
  std::string list;
  for (Micros l : levels.levels) list += (list.empty() ? "" : ", ") + std::to_string(l);
  a.summary = dist.task_label() + ": " + std::to_string(levels.size()) + " level(s) [" + list + "] us";
  return a;
}

// ---- schedtest -------------------------------------------------------------

Artifacts run_schedtest(const Json& c, const Sinks&) {
  const auto path = cfg<std::string>(c, "taskset");
  const LoadedTaskSet loaded = load_taskset(path);
  const SchedPolicy policy = parse_sched_policy(cfg<std::string>(c, "policy"), loaded.set.gamma);
  const DesignReport r = design_report(loaded.set, policy);

  Artifacts a;
  Json doc = design_report_json(r);
  Json tasks = Json::array();
  for (const auto& t : loaded.set.tasks) {
    tasks.push_back({{"id", t.id},
                     {"criticality", std::string(to_string(t.criticality))},
                     {"level1_us", t.lo_budget()},
                     {"p_ovrun", t.p_ovrun()}});
  }
  doc["tasks"] = tasks;
  a.json = doc;
  a.inputs.push_back(path);
  for (const auto& f : loaded.trace_files) a.inputs.push_back(f);
  a.summary = std::string(r.edfvd_schedulable ? "schedulable" : "NOT schedulable") + " under " +
              policy.name() + ", P_MS = " + format_double(r.p_ms_sys) +
              ", goal = " + format_double(r.system_goal);
  return a;
}

// ---- simulate --------------------------------------------------------------

Artifacts run_simulate(const Json& c, const Sinks& sinks) {
  const auto path = cfg<std::string>(c, "taskset");
  const LoadedTaskSet loaded = load_taskset(path);
  SimConfig sc;
  sc.task_set = loaded.set;
  sc.exec_models = loaded.exec_models;
  if (!c.at("horizon_us").is_null()) {
    sc.horizon = Horizon::micros(cfg<Micros>(c, "horizon_us"));
  } else {
    sc.horizon = Horizon::hyperperiod_count(cfg<double>(c, "hyperperiods"));
  }
  sc.seed = cfg<std::uint64_t>(c, "seed");
  const auto level_policy = cfg<std::string>(c, "level_policy");
  if (level_policy == "multi_mics") {
    sc.level_policy = LevelPolicy::MultiLevel;
  } else if (level_policy == "anti_mics") {
    sc.level_policy = LevelPolicy::TopLevelOnly;
  } else {
    throw ConfigError("unknown level policy '" + level_policy + "' (multi_mics | anti_mics)");
  }
  sc.lc_policy_hi = parse_lc_hi_policy(cfg<std::string>(c, "lc_policy"));
  sc.level_window = cfg<std::size_t>(c, "level_window");
  sc.level_overhead = cfg<Micros>(c, "level_overhead_us");
  sc.scale_lc_admission = cfg<bool>(c, "scale_lc_admission");
  sc.record_events = sinks.events.has_value();
  const SimResult r = run(sc);

  Artifacts a;
  a.json = sim_metrics_json(r.metrics);
  if (sinks.events) a.extra.emplace_back(*sinks.events, event_log_csv(r.events));
  a.inputs.push_back(path);
  for (const auto& f : loaded.trace_files) a.inputs.push_back(f);
  a.seed = sc.seed;
  const auto& m = r.metrics;
  a.summary = "QoS = " + format_double(m.qos) + ", util_waste = " + format_double(m.util_waste) +
              ", mode switches = " + std::to_string(m.mode_switches) +
              ", HC misses = " + std::to_string(m.hc_deadline_misses) +
              (m.unverified ? " (task set NOT accepted by EDF-VD: run unverified)" : "");
  return a;
}

// ---- gen -------------------------------------------------------------------

Artifacts run_gen(const Json& c, const Sinks& sinks) {
  if (!sinks.out) throw ConfigError("gen needs --out (traces are written next to the task set)");
  const GenSpec spec = gen_spec_from_json(c.at("genspec"));
  const double u_bound = cfg<double>(c, "u_bound");
  const WcetPolicy policy = parse_wcet_policy(cfg<std::string>(c, "wcet_policy"));
  std::mt19937_64 rng(sub_seed(spec.seed, 0));
  const McTaskSet set = assign_wcet_lo(generate_task_set(spec, u_bound, rng), policy, spec);

  Artifacts a;
  std::map<std::string, std::string> trace_paths;
  const fs::path dir = sinks.out->parent_path();
  for (const auto& t : set.tasks) {
    if (!t.trace) continue;
    const std::string rel = "traces/" + t.id + ".csv";
    trace_paths[t.id] = rel;
    a.extra.emplace_back(dir / rel, format_trace(*t.trace));
  }
  Json doc = taskset_json(set, trace_paths);
  const double achieved = std::max(
      utilization(set, Criticality::HC, Mode::LO) + utilization(set, Criticality::LC, Mode::LO),
      utilization(set, Criticality::HC, Mode::HI));
  doc["generation"] = {{"u_bound_target", u_bound},
                       {"u_bound", achieved},
                       {"wcet_policy", policy.name()},
                       {"notes", kGenerationNotes}};
  a.json = doc;
  a.seed = spec.seed;
  a.summary = std::to_string(set.tasks.size()) + " task(s), U_bound = " + format_double(achieved);
  return a;
}

// ---- sweep -----------------------------------------------------------------

Artifacts run_sweep(const Json& c, const Sinks&) {
  const GenSpec spec = gen_spec_from_json(c.at("genspec"));
  std::vector<WcetPolicy> policies;
  for (const auto& p : cfg<std::vector<std::string>>(c, "policies")) policies.push_back(parse_wcet_policy(p));
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  const SweepResult r = sweep(spec, policies);

  Artifacts a;
  a.csv = sweep_csv(r);
  a.seed = spec.seed;
  a.summary = std::to_string(r.points.size()) + " sweep points, " + std::to_string(spec.sets_per_point) +
              " sets each";
  return a;
}

Artifacts execute(const std::string& command, const Json& config, const Sinks& sinks) {
  if (command == "analyze") return run_analyze(config, sinks);
  if (command == "levels") return run_levels(config, sinks);
  if (command == "schedtest") return run_schedtest(config, sinks);
  if (command == "simulate") return run_simulate(config, sinks);
  if (command == "gen") return run_gen(config, sinks);
  if (command == "sweep") return run_sweep(config, sinks);
  throw ParseError(0, "unknown command '" + command + "' in manifest");
}

void write_output(const std::optional<fs::path>& path, const std::string& text) {
  if (path) {
    write_text_file(*path, text);
  } else {
    std::cout << text;
    std::cout.flush();
  }
}

int emit(const std::string& command, const Json& config, const Sinks& sinks, const std::string& timestamp) {
  Artifacts a = execute(command, config, sinks);
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = a.seed;
  m.timestamp = timestamp;
  for (const auto& in : a.inputs) m.inputs.push_back({in.string(), sha256_file(in)});

  if (a.json) {
    Json doc = *a.json;
    doc["manifest"] = manifest_json(m);
    write_output(sinks.out, dump_json(doc));
  } else {
    write_output(sinks.out, a.csv);
    std::optional<fs::path> mpath = sinks.manifest;
    if (!mpath && sinks.out) mpath = fs::path(sinks.out->string() + ".manifest.json");
    if (mpath) write_text_file(*mpath, dump_json(manifest_json(m)));
  }
  for (const auto& [path, text] : a.extra) write_text_file(path, text);
  std::cerr << "mics " << command << ": " << a.summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-WCET derivation, EDF-VD schedulability and mixed-criticality simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Sinks sinks;
  std::optional<std::uint64_t> seed;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Derive a single WCET^LO from a trace");
  std::string a_trace, a_format = "csv-v1";
  Micros a_hi = 0, a_step = 0;
  double a_split = 0.5, a_threshold = kDefaultStabilityThreshold;
  analyze->add_option("trace", a_trace, "Trace file")->required();
  analyze->add_option("--wcet-hi", a_hi, "WCET^HI in us")->required();
  analyze->add_option("--step", a_step, "Scan a uniform grid with this step (us) instead of sample values");
  analyze->add_option("--format", a_format, "Trace format")->capture_default_str();
  analyze->add_option("--stability-split", a_split, "Prefix fraction for the ECDF stability check")
      ->capture_default_str();
  analyze->add_option("--stability-threshold", a_threshold)->capture_default_str();
  analyze->add_option("--out", sinks.out, "Output JSON (default stdout)");
  analyze->add_option("--curve", sinks.curve, "Write the EET curve CSV here");

  // levels
  auto* levels = app.add_subcommand("levels", "Derive multiple WCET^LO levels from a trace");
  std::string l_trace, l_format = "csv-v1";
  Micros l_hi = 0, l_period = 0;
  double l_gain = 0.05;
  std::size_t l_max = 4;
  levels->add_option("trace", l_trace, "Trace file")->required();
  levels->add_option("--wcet-hi", l_hi, "WCET^HI in us")->required();
  levels->add_option("--period", l_period, "Task period in us")->required();
  levels->add_option("--min-gain", l_gain, "Minimum utilization gain for another level")->capture_default_str();
  levels->add_option("--max-levels", l_max)->capture_default_str();
  levels->add_option("--format", l_format)->capture_default_str();
  levels->add_option("--out", sinks.out, "Output JSON (default stdout)");

  // schedtest
  auto* schedtest = app.add_subcommand("schedtest", "Design-time objectives and EDF-VD test");
  std::string s_taskset, s_policy = "auto";
  schedtest->add_option("taskset", s_taskset, "taskset-v1 JSON")->required();
  schedtest->add_option("--policy", s_policy, "drop | degrade[:gamma] (auto: degrade iff the set's gamma > 0)")
      ->capture_default_str();
  schedtest->add_option("--out", sinks.out, "Output JSON (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the dual-criticality EDF-VD simulator");
  std::string m_taskset, m_policy = "multi_mics", m_lc = "auto";
  std::optional<Micros> m_horizon;
  std::optional<double> m_hyper;
  std::size_t m_window = 3;
  Micros m_overhead = 1;
  bool m_no_scale = false;
  simulate->add_option("taskset", m_taskset, "taskset-v1 JSON")->required();
  auto* h1 = simulate->add_option("--horizon", m_horizon, "Horizon in us");
  auto* h2 = simulate->add_option("--hyperperiods", m_hyper, "Horizon in hyper-periods");
  h1->excludes(h2);
  simulate->add_option("--seed", seed, "Seed (fallback: MICS_SEED, then 0)");
  simulate->add_option("--policy", m_policy, "multi_mics | anti_mics")->capture_default_str();
  simulate->add_option("--lc-policy", m_lc, "drop | extend:<gamma> (auto: from the set's gamma)")
      ->capture_default_str();
  simulate->add_option("--window", m_window, "Level-selection history window W")->capture_default_str();
  simulate->add_option("--overhead", m_overhead, "Level-change overhead in us")->capture_default_str();
  simulate->add_flag("--no-lc-scaling", m_no_scale, "Do not scale LC releases with the selected levels");
  simulate->add_option("--out", sinks.out, "Output JSON (default stdout)");
  simulate->add_option("--events", sinks.events, "Write the event log CSV here");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate one random task set with traces");
  std::optional<std::string> g_spec;
  double g_u = 0.5;
  std::string g_policy = "anti_mics";
  gen->add_option("--spec", g_spec, "GenSpec JSON (defaults otherwise)");
  gen->add_option("--u-bound", g_u, "Target utilization bound")->required();
  gen->add_option("--wcet-policy", g_policy, "anti_mics | multi_mics | lambda(r) | mean_plus_nsigma(n)")
      ->capture_default_str();
  gen->add_option("--seed", seed, "Seed (fallback: MICS_SEED, then the spec's seed)");
  gen->add_option("--out", sinks.out, "Output task set JSON")->required();

  // sweep
  auto* sweepc = app.add_subcommand("sweep", "Acceptance-ratio sweep over utilization bounds");
  std::optional<std::string> w_spec;
  std::vector<std::string> w_policies;
  std::optional<std::size_t> w_sets;
  sweepc->add_option("genspec", w_spec, "GenSpec JSON (defaults otherwise)");
  sweepc->add_option("--policies", w_policies, "WCET policies")->delimiter(',');
  sweepc->add_option("--sets-per-point", w_sets, "Override sets_per_point");
  sweepc->add_option("--seed", seed, "Seed (fallback: MICS_SEED, then the spec's seed)");
  sweepc->add_option("--out", sinks.out, "Output CSV (default stdout)");
  sweepc->add_option("--manifest", sinks.manifest, "Manifest path (default <out>.manifest.json)");

  // rerun
  auto* rerun = app.add_subcommand("rerun", "Replay a command from a manifest or an output JSON");
  std::string r_source;
  rerun->add_option("source", r_source, "Manifest or output JSON")->required();
  rerun->add_option("--out", sinks.out, "Output path (default stdout)");
  rerun->add_option("--curve", sinks.curve);
  rerun->add_option("--events", sinks.events);
  rerun->add_option("--manifest", sinks.manifest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorClass::Input);
  }

  try {
    if (const char* isa = std::getenv("MICS_KERNELS"); isa && std::string(isa) == "scalar") {
      kernels::force_isa(kernels::Isa::Scalar);
    }
    if (*rerun) {
      const RunManifest m = manifest_from_json(read_json_file(r_source));
      verify_inputs(m);
      return emit(m.command, m.config, sinks, m.timestamp);
    }

    Json config;
    std::string command;
    if (*analyze) {
      command = "analyze";
      config = {{"trace", abs_path(a_trace)},
                {"trace_format", a_format},
                {"wcet_hi_us", a_hi},
                {"scan", {{"uniform_grid", a_step > 0}, {"step_us", a_step > 0 ? a_step : Micros{1}}}},
                {"stability_split", a_split},
                {"stability_threshold", a_threshold}};
    } else if (*levels) {
      command = "levels";
      config = {{"trace", abs_path(l_trace)},
                {"trace_format", l_format},
                {"wcet_hi_us", l_hi},
                {"period_us", l_period},
                {"min_gain", l_gain},
                {"max_levels", l_max}};
    } else if (*schedtest) {
      command = "schedtest";
      std::string policy = s_policy;
      if (policy == "auto") {
        const double g = load_taskset(s_taskset).set.gamma;
        policy = g > 0.0 ? "degrade:" + format_double(g) : "drop";
      }
      config = {{"taskset", abs_path(s_taskset)}, {"policy", policy}};
    } else if (*simulate) {
      command = "simulate";
      if (!m_horizon && !m_hyper) throw ConfigError("simulate needs --horizon or --hyperperiods");
      std::string lc = m_lc;
      if (lc == "auto") {
        const double g = load_taskset(m_taskset).set.gamma;
        lc = g > 0.0 ? "extend:" + format_double(g) : "drop";
      }
      config = {{"taskset", abs_path(m_taskset)},
                {"horizon_us", m_horizon ? Json(*m_horizon) : Json(nullptr)},
                {"hyperperiods", m_hyper ? Json(*m_hyper) : Json(nullptr)},
                {"seed", resolve_seed(seed, 0)},
                {"level_policy", m_policy},
                {"lc_policy", lc},
                {"level_window", m_window},
                {"level_overhead_us", m_overhead},
                {"scale_lc_admission", !m_no_scale}};
    } else if (*gen) {
      command = "gen";
      GenSpec spec = g_spec ? gen_spec_from_json(read_json_file(*g_spec)) : GenSpec{};
      spec.seed = resolve_seed(seed, spec.seed);
      config = {{"genspec", gen_spec_json(spec)},
                {"u_bound", g_u},
                {"wcet_policy", parse_wcet_policy(g_policy).name()}};
    } else if (*sweepc) {
      command = "sweep";
      GenSpec spec = w_spec ? gen_spec_from_json(read_json_file(*w_spec)) : GenSpec{};
      spec.seed = resolve_seed(seed, spec.seed);
      if (w_sets) spec.sets_per_point = *w_sets;
      spec.validate();
      if (w_policies.empty()) w_policies = {"anti_mics", "multi_mics", "lambda(1/2)", "mean_plus_nsigma(2)"};
      std::vector<std::string> names;
      for (const auto& p : w_policies) names.push_back(parse_wcet_policy(p).name());
      config = {{"genspec", gen_spec_json(spec)}, {"policies", names}, {"notes", kGenerationNotes}};
    }
    return emit(command, config, sinks, manifest_timestamp());
  } catch (const Error& e) {
    std::cerr << "mics: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "mics: internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorClass::Internal);
  }
}
