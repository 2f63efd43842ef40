#include "mics/mc_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mics/error.hpp"
#include "mics/format.hpp"

namespace mics {
namespace {

constexpr double kBoundaryTol = 1e-12;

}  // namespace

McTask make_hc_task(std::string id, Micros period, Micros wcet_hi, WcetLevels levels) {
  McTask t;
  t.id = std::move(id);
  t.criticality = Criticality::HC;
  t.period = t.deadline = period;
  t.wcet_hi = wcet_hi;
  levels.wcet_hi = wcet_hi;
  t.levels = std::move(levels);
  return t;
}

McTask make_lc_task(std::string id, Micros period, Micros budget) {
  McTask t;
  t.id = std::move(id);
  t.criticality = Criticality::LC;
  t.period = t.deadline = period;
  t.wcet_hi = budget;
  t.levels = single_level(budget, budget);
  return t;
}

void McTaskSet::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (!ids.insert(t.id).second) throw ConfigError("duplicate task id '" + t.id + "'");
    if (t.period <= 0) throw ConfigError("task '" + t.id + "': period must be positive");
    if (t.deadline != t.period) throw ConfigError("task '" + t.id + "': deadline must equal period");
    if (t.wcet_hi <= 0) throw ConfigError("task '" + t.id + "': wcet_hi must be positive");
    t.levels.validate();
    if (t.levels.wcet_hi != t.wcet_hi) throw ConfigError("task '" + t.id + "': levels/wcet_hi mismatch");
    if (!t.is_hc() && (t.levels.size() != 1 || t.levels.top() != t.wcet_hi)) {
      throw ConfigError("LC task '" + t.id + "' must carry a single budget equal to wcet_hi");
    }
  }
}

Micros McTaskSet::hyperperiod() const {
  Micros h = 1;
  for (const auto& t : tasks) {
    const Micros g = std::gcd(h, t.period);
    const Micros factor = t.period / g;
    if (h > std::numeric_limits<Micros>::max() / factor) {
      throw HyperperiodOverflow("lcm of task periods exceeds int64 microseconds");
    }
    h *= factor;
  }
  return h;
}

double utilization(const McTaskSet& set, Criticality criticality, Mode mode) {
  double u = 0.0;
  for (const auto& t : set.tasks) {
    if (t.criticality != criticality) continue;
    u += static_cast<double>(t.budget(mode)) / static_cast<double>(t.period);
  }
  return u;
}

double lc_utilization_bound(double u_hc_lo, double u_hc_hi, double gamma) {
  if (u_hc_hi > 1.0 + kBoundaryTol) {
    throw InfeasibleHcLoad("U_HC^HI = " + format_double(u_hc_hi) + " exceeds 1");
  }
  if (u_hc_lo < 0.0 || u_hc_lo > u_hc_hi + kBoundaryTol) {
    throw ConfigError("need 0 <= U_HC^LO <= U_HC^HI");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");

  const double lo_term = 1.0 - u_hc_lo;
  const double num = std::max(0.0, 1.0 - u_hc_hi);
  const double den = u_hc_lo + gamma * (1.0 - u_hc_lo);
  const double hi_term = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  return std::max(0.0, std::min(lo_term, hi_term));
}

double mode_switch_probability(std::span<const double> hc_overrun_probabilities) {
  double none = 1.0;
  for (double p : hc_overrun_probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_ovrun must lie in [0, 1]");
    none *= 1.0 - p;
  }
  return 1.0 - none;
}

double mode_switch_probability(const McTaskSet& set) {
  std::vector<double> ps;
  for (const auto& t : set.tasks) {
    if (t.is_hc()) ps.push_back(t.p_ovrun());
  }
  return mode_switch_probability(ps);
}

double system_goal(double u_lc_lo_max, double p_ms) { return u_lc_lo_max * (1.0 - p_ms); }

std::string SchedPolicy::name() const {
  return kind == Kind::DropLc ? "drop_lc" : "degrade_lc(" + format_double(gamma) + ")";
}

SchedPolicy parse_sched_policy(const std::string& text, double default_gamma) {
  if (text == "drop" || text == "drop_lc") return SchedPolicy::drop();
  std::string head = text;
  double g = default_gamma;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    try {
      g = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad gamma in policy '" + text + "'");
    }
  }
  if (head == "degrade" || head == "degrade_lc") {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    return SchedPolicy::degrade(g);
  }
  throw ConfigError("unknown scheduling policy '" + text + "' (drop | degrade[:gamma])");
}

EdfVdVerdict edfvd_test(double u_lc_lo, double u_hc_lo, double u_hc_hi, const SchedPolicy& policy) {
  if (u_lc_lo + u_hc_lo > 1.0 + kBoundaryTol) return {false, 1.0};
  if (u_hc_lo <= 0.0) {
    // No HC load in LO mode: plain EDF on the LC tasks.
    return {u_lc_lo <= 1.0 + kBoundaryTol && u_hc_hi <= kBoundaryTol, 1.0};
  }
  const double x = std::min(1.0, u_hc_lo / (1.0 - u_lc_lo));
  double hi_load = x * u_lc_lo + u_hc_hi;
  if (policy.kind == SchedPolicy::Kind::DegradeLc) hi_load += policy.gamma * u_lc_lo;
  return {hi_load <= 1.0 + kBoundaryTol, x};
}

EdfVdVerdict edfvd_test(const McTaskSet& set, const SchedPolicy& policy) {
  return edfvd_test(utilization(set, Criticality::LC, Mode::LO),
                    utilization(set, Criticality::HC, Mode::LO),
                    utilization(set, Criticality::HC, Mode::HI), policy);
}

DesignReport design_report(const McTaskSet& set, const SchedPolicy& policy) {
  DesignReport r;
  r.policy = policy;
  r.u_hc_lo = utilization(set, Criticality::HC, Mode::LO);
  r.u_hc_hi = utilization(set, Criticality::HC, Mode::HI);
  r.u_lc_lo = utilization(set, Criticality::LC, Mode::LO);
  const double gamma = policy.kind == SchedPolicy::Kind::DegradeLc ? policy.gamma : 0.0;
  r.u_lc_lo_max = lc_utilization_bound(r.u_hc_lo, r.u_hc_hi, gamma);
  r.p_ms_sys = mode_switch_probability(set);
  r.system_goal = system_goal(r.u_lc_lo_max, r.p_ms_sys);
  const auto v = edfvd_test(set, policy);
  r.edfvd_schedulable = v.schedulable;
  r.virtual_deadline_factor_x = v.x;
  return r;
}

}  // namespace mics
