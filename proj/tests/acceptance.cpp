// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and runtime limits are fixed constants below.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mics/anti_mics.hpp"
#include "mics/json_io.hpp"
#include "mics/kernels.hpp"
#include "mics/mc_model.hpp"
#include "mics/multi_mics.hpp"
#include "mics/seed.hpp"
#include "mics/simulator.hpp"
#include "mics/taskgen.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace mics;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  failures += pass ? 0 : 1;
  std::printf("%s  %2d  %-28s %s [%.3f s, limit %g s]%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs, limit_s, in_time ? "" : " TOO SLOW");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- 1-3: golden values -------------------------------------------------

Outcome eq7_golden() {
  const std::vector<double> p{0.0387, 0.0719, 0.0229, 0.0413, 0.0902};
  const double pms = mode_switch_probability(p) * 100.0;
  return {std::fabs(pms - 23.96) <= 0.05, fmt("P_MS = %.4f%% (23.96 +- 0.05 pp)", pms)};
}

Outcome eq8_golden() {
  const double g = system_goal(0.8141, 0.2396);
  return {std::fabs(g - 0.619) <= 0.001, fmt("goal = %.5f (0.619 +- 0.001)", g)};
}

Outcome eet_golden() {
  const double a = eet_value(0.9281, 44000, 131000) / 1000.0;
  const double b = eet_value(0.971, 55000, 131000) / 1000.0;
  return {std::fabs(a - 50.3) <= 0.1 && std::fabs(b - 57.20) <= 0.01,
          fmt("EET(44ms) = %.3f ms (50.3 +- 0.1), EET(55ms) = %.3f ms (57.20 +- 0.01)", a, b)};
}

// ---- 4-5: oracle and SEET identities -------------------------------------

Outcome oracle_equivalence() {
  int agree = 0;
  const int total = 1000;
  for (int c = 0; c < total; ++c) {
    auto rng = testgen::case_rng(1004, static_cast<std::uint64_t>(c));
    const auto s = testgen::samples(rng, 200, 5000);
    const auto d = build_distribution(make_trace("x", s.samples), s.wcet_hi);
    const auto over_samples = oracle::wcet_lo_over_samples(s.samples, s.wcet_hi);
    const auto every = oracle::wcet_lo_every_integer(s.samples, s.wcet_hi);
    bool ok = over_samples.t == every.t;
    for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
      if (isa == kernels::Isa::Avx2 && !kernels::avx2_available()) continue;
      kernels::force_isa(isa);
      ok = ok && derive_wcet_lo(d).wcet_lo == every.t;
    }
    kernels::force_isa(std::nullopt);
    agree += ok ? 1 : 0;
  }
  return {agree == total, fmt("%.0f/%.0f distributions agree (required 100%%)", agree, total)};
}

Outcome seet_identities() {
  const int total = 1000;
  int ok = 0;
  double worst = 0.0;
  for (int c = 0; c < total; ++c) {
    auto rng = testgen::case_rng(1005, static_cast<std::uint64_t>(c));
    const auto s = testgen::samples(rng, 200, 5000);
    const auto d = build_distribution(make_trace("x", s.samples), s.wcet_hi);
    const auto r = derive_wcet_lo(d);
    const WcetLevels lv{{r.wcet_lo}, {}, r.p_ovrun, s.wcet_hi};
    const double e = eet(d, r.wcet_lo);
    const double s1 = seet(d, lv, r.wcet_lo);
    const double s0 = seet(d, lv, 0);
    const double rel1 = std::fabs(s1 - e) / e;
    const double rel0 = std::fabs(s0 - s1) / s1;
    worst = std::max({worst, rel1, rel0});
    ok += (rel1 <= 1e-9 && rel0 <= 1e-9) ? 1 : 0;
  }
  return {ok == total, fmt("%.0f/%.0f hold, worst relative error %.2e (limit 1e-9)", ok, total, worst)};
}

// ---- 6: safety ------------------------------------------------------------

Outcome simulator_safety() {
  const std::size_t want_per_group = 60;
  const int seeds = 10;
  const double hyperperiods = 10;
  std::size_t accepted = 0, attempts = 0;
  std::uint64_t misses = 0, switches = 0, jobs = 0, runs = 0;
  for (double gamma : {0.0, 0.5}) {
    GenSpec spec;
    spec.period_choices = {10000, 20000, 40000, 50000, 100000, 200000};
    spec.samples_per_task = 500;
    spec.gamma = gamma;
    const auto policy = spec.sched_policy();
    std::size_t group = 0;
    for (std::uint64_t i = 0; group < want_per_group && i < 5000; ++i) {
      ++attempts;
      std::mt19937_64 eng(sub_seed(606 + static_cast<std::uint64_t>(gamma * 10), i));
      const double u = 0.5 + 0.5 * static_cast<double>(i % 11) / 10.0;
      auto set = assign_wcet_lo(generate_task_set(spec, u, eng), WcetPolicy::multi_mics(), spec);
      if (!edfvd_test(set, policy).schedulable) continue;
      for (auto& t : set.tasks) t.trace.reset();  // bootstrap from the distribution
      ++group;
      for (int s = 0; s < seeds; ++s) {
        SimConfig cfg;
        cfg.task_set = set;
        cfg.horizon = Horizon::hyperperiod_count(hyperperiods);
        cfg.seed = sub_seed(static_cast<std::uint64_t>(s), i);
        cfg.lc_policy_hi = gamma > 0 ? LcHiPolicy::extend_period(gamma) : LcHiPolicy::drop();
        const auto m = run(cfg).metrics;
        misses += m.hc_deadline_misses;
        switches += m.mode_switches;
        jobs += m.hc_jobs_released;
        ++runs;
      }
    }
    accepted += group;
  }
  const bool pass = accepted >= 100 && misses == 0;
  return {pass, fmt("%.0f accepted sets x 10 seeds x 10 hyper-periods: %.0f HC misses over %.0f HC jobs, ",
                    static_cast<double>(accepted), static_cast<double>(misses), static_cast<double>(jobs)) +
                    fmt("%.0f mode switches", static_cast<double>(switches))};
}

// ---- 7: mode-switch rate --------------------------------------------------

Outcome switch_rate() {
  bool pass = true;
  std::string detail;
  for (double p : {0.01, 0.05, 0.2}) {
    SimConfig cfg;
    cfg.task_set.tasks.push_back(make_hc_task("a", 1000, 900, single_level(400, 900)));
    RegimeModelSpec m;
    // Two point masses either side of L1 = 400, so P(exec > L1) is exactly p.
    m.regimes.push_back({{{1.0 - p, 300.0, 0.0}, {p, 650.0, 0.0}}, 1, 0});
    cfg.exec_models["a"] = m;
    cfg.horizon = Horizon::micros(60000 * 1000);
    cfg.seed = 7;
    const auto r = run(cfg).metrics;
    const double n = static_cast<double>(r.hc_jobs_released);
    const double rate = static_cast<double>(r.mode_switches) / n;
    const double sigma = std::sqrt(p * (1 - p) / n);
    const bool ok = n >= 50000 && std::fabs(rate - p) <= 3 * sigma;
    pass = pass && ok;
    detail += fmt("p=%.2f: %.5f (%.2f sigma, n=%.0f); ", p, rate, std::fabs(rate - p) / sigma, n);
  }
  return {pass, detail};
}

// ---- 8: two-regime workload ------------------------------------------------

struct RegimeWorkload {
  McTaskSet set;
  std::map<std::string, RegimeModelSpec> models;
};

RegimeModelSpec two_regime_model(double wcet_hi, double stay) {
  RegimeModelSpec m;
  // Light regime: short runs. Heavy regime: long runs with a rare spike.
  m.regimes.push_back({{{1.0, 0.15 * wcet_hi, 0.01 * wcet_hi}}, 1, 0});
  m.regimes.push_back({{{0.97, 0.45 * wcet_hi, 0.02 * wcet_hi}, {0.03, 0.8 * wcet_hi, 0.05 * wcet_hi}}, 1, 0});
  m.transition = {{stay, 1 - stay}, {1 - stay, stay}};
  return m;
}

RegimeWorkload regime_workload() {
  RegimeWorkload w;
  struct Hc {
    const char* id;
    Micros period, hi;
  };
  for (const Hc& h : {Hc{"hc_a", 10000, 5000}, Hc{"hc_b", 20000, 6000}}) {
    const auto model = two_regime_model(static_cast<double>(h.hi), 0.98);
    const auto trace = sample_trace(model, h.hi, 20000, sub_seed(808, static_cast<std::uint64_t>(h.period)), h.id);
    const auto dist = build_distribution(trace, h.hi);
    LevelOptions o;
    o.period = h.period;
    auto t = make_hc_task(h.id, h.period, h.hi, derive_levels(dist, o));
    t.distribution = std::make_shared<const EmpiricalDistribution>(dist);
    w.set.tasks.push_back(t);
    w.models[h.id] = model;
  }
  // LC demand above what the level-1 budgets leave room for.
  w.set.tasks.push_back(make_lc_task("lc_a", 5000, 1750));
  w.set.tasks.push_back(make_lc_task("lc_b", 25000, 7500));
  return w;
}

Outcome regime_comparison() {
  const auto w = regime_workload();
  const double u_hc_lo = utilization(w.set, Criticality::HC, Mode::LO);
  const double u_hc_hi = utilization(w.set, Criticality::HC, Mode::HI);
  const double u_lc = utilization(w.set, Criticality::LC, Mode::LO);
  const double bound = lc_utilization_bound(u_hc_lo, u_hc_hi, 0.0);
  int qos_wins = 0, waste_wins = 0;
  double q_multi = 0, q_anti = 0, w_multi = 0, w_anti = 0;
  std::uint64_t hc_misses = 0;
  for (int s = 0; s < 10; ++s) {
    SimConfig cfg;
    cfg.task_set = w.set;
    cfg.exec_models = w.models;
    cfg.horizon = Horizon::hyperperiod_count(100);
    cfg.seed = sub_seed(8, static_cast<std::uint64_t>(s));
    cfg.level_policy = LevelPolicy::MultiLevel;
    const auto multi = run(cfg).metrics;
    cfg.level_policy = LevelPolicy::TopLevelOnly;
    const auto anti = run(cfg).metrics;
    qos_wins += multi.qos > anti.qos ? 1 : 0;
    waste_wins += multi.util_waste < anti.util_waste ? 1 : 0;
    q_multi += multi.qos / 10;
    q_anti += anti.qos / 10;
    w_multi += multi.util_waste / 10;
    w_anti += anti.util_waste / 10;
    hc_misses += multi.hc_deadline_misses + anti.hc_deadline_misses;
  }
  std::string levels;
  for (const auto& t : w.set.tasks) {
    if (!t.is_hc()) continue;
    levels += t.id + "=[";
    for (std::size_t i = 0; i < t.levels.size(); ++i) levels += (i ? "," : "") + std::to_string(t.levels.levels[i]);
    levels += "] ";
  }
  const bool pass = qos_wins >= 8 && waste_wins >= 8;
  return {pass, fmt("QoS wins %.0f/10 (mean %.4f vs %.4f), ", qos_wins, q_multi, q_anti) +
                    fmt("waste wins %.0f/10 (mean %.4f vs %.4f); ", waste_wins, w_multi, w_anti) +
                    fmt("U_LC %.3f > L1 bound %.3f, HC misses %.0f; ", u_lc, bound, static_cast<double>(hc_misses)) +
                    levels};
}

// ---- 9: acceptance sweep --------------------------------------------------

Outcome sweep_dominance() {
  GenSpec spec;
  spec.sets_per_point = 200;
  spec.shape = DistributionShape::Bimodal;
  spec.seed = 2024;
  const std::vector<WcetPolicy> ps{WcetPolicy::anti_mics(), WcetPolicy::multi_mics(), WcetPolicy::lambda(0.5),
                                   WcetPolicy::mean_plus_nsigma(2)};
  const auto r = sweep(spec, ps);
  bool dominance = true, low_all_one = true;
  double max_gap = 0.0, sum_gap = 0.0;
  int high_points = 0;
  std::map<double, std::map<std::string, double>> by_u;
  for (const auto& p : r.points) by_u[p.u_bound][p.policy] = p.acceptance_ratio;
  for (const auto& [u, row] : by_u) {
    if (u <= 0.25 + 1e-12) {
      for (const auto& [name, a] : row) low_all_one = low_all_one && a == 1.0;
    }
    if (u >= 0.75 - 1e-12) {
      const double gap = row.at("anti_mics") - row.at("lambda(0.5)");
      dominance = dominance && gap >= 0.0;
      max_gap = std::max(max_gap, gap);
      sum_gap += gap;
      ++high_points;
    }
  }
  return {dominance && low_all_one,
          std::string("anti >= lambda(1/2) at all u >= 0.75: ") + (dominance ? "yes" : "no") +
              "; all = 1 for u <= 0.25: " + (low_all_one ? "yes" : "no") + "; " +
              fmt("gap max %.3f, mean %.3f over %.0f points", max_gap, sum_gap / high_points, high_points)};
}

// ---- 10: CLI rerun determinism --------------------------------------------

int sh(const std::string& args) {
  const std::string cmd = std::string(MICS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

bool same_files(const std::filesystem::path& a, const std::filesystem::path& b) {
  return std::filesystem::exists(a) && std::filesystem::exists(b) && read_text_file(a) == read_text_file(b);
}

Outcome cli_rerun() {
  const auto dir = testpaths::scratch("acceptance_cli");
  const auto qs = testpaths::data("quicksort_like.csv");
  const auto sm = testpaths::data("smooth_like.csv");
  write_text_file(dir / "spec.json",
                  R"({"period_choices_us": [10000, 20000, 50000, 100000], "samples_per_task": 300, "seed": 5})");
  write_text_file(dir / "sweep.json",
                  R"({"u_bound_targets": [0.5, 0.8, 1.0], "sets_per_point": 20, "samples_per_task": 200})");
  struct Step {
    std::string name, run, rerun;
    std::vector<std::pair<std::string, std::string>> compare;
  };
  const std::vector<Step> steps{
      {"analyze", "analyze " + q(qs) + " --wcet-hi 131000 --out " + q(dir / "a.json") + " --curve " + q(dir / "a.csv"),
       "rerun " + q(dir / "a.json") + " --out " + q(dir / "a2.json") + " --curve " + q(dir / "a2.csv"),
       {{"a.json", "a2.json"}, {"a.csv", "a2.csv"}}},
      {"levels", "levels " + q(sm) + " --wcet-hi 48000 --period 120000 --out " + q(dir / "l.json"),
       "rerun " + q(dir / "l.json") + " --out " + q(dir / "l2.json"), {{"l.json", "l2.json"}}},
      {"gen", "gen --spec " + q(dir / "spec.json") + " --u-bound 0.7 --wcet-policy multi_mics --out " + q(dir / "g" / "set.json"),
       "rerun " + q(dir / "g" / "set.json") + " --out " + q(dir / "g2" / "set.json"),
       {{"g/set.json", "g2/set.json"}, {"g/traces/t00.csv", "g2/traces/t00.csv"}}},
      {"schedtest", "schedtest " + q(dir / "g" / "set.json") + " --out " + q(dir / "s.json"),
       "rerun " + q(dir / "s.json") + " --out " + q(dir / "s2.json"), {{"s.json", "s2.json"}}},
      {"simulate",
       "simulate " + q(dir / "g" / "set.json") + " --hyperperiods 3 --seed 12 --out " + q(dir / "m.json") +
           " --events " + q(dir / "m.csv"),
       "rerun " + q(dir / "m.json") + " --out " + q(dir / "m2.json") + " --events " + q(dir / "m2.csv"),
       {{"m.json", "m2.json"}, {"m.csv", "m2.csv"}}},
      {"sweep", "sweep " + q(dir / "sweep.json") + " --seed 3 --out " + q(dir / "w.csv"),
       "rerun " + q(dir / "w.csv.manifest.json") + " --out " + q(dir / "w2.csv") + " --manifest " +
           q(dir / "w2.csv.manifest.json"),
       {{"w.csv", "w2.csv"}, {"w.csv.manifest.json", "w2.csv.manifest.json"}}},
  };
  bool pass = true;
  std::string detail;
  for (const auto& s : steps) {
    bool ok = sh(s.run) == 0 && sh(s.rerun) == 0;
    for (const auto& [a, b] : s.compare) ok = ok && same_files(dir / a, dir / b);
    pass = pass && ok;
    detail += s.name + (ok ? " ok; " : " DIFFERS; ");
  }
  return {pass, detail};
}

}  // namespace

int main() {
  report(1, "mode-switch probability", 0.001, eq7_golden);
  report(2, "system goal", 0.001, eq8_golden);
  report(3, "EET golden values", 0.001, eet_golden);
  report(4, "oracle equivalence", 10, oracle_equivalence);
  report(5, "SEET identities", 10, seet_identities);
  report(6, "simulator safety", 300, simulator_safety);
  report(7, "mode-switch rate", 60, switch_rate);
  report(8, "two-regime QoS and waste", 300, regime_comparison);
  report(9, "acceptance sweep", 600, sweep_dominance);
  report(10, "rerun determinism", 60, cli_rerun);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
