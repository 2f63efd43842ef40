#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mics/multi_mics.hpp"
#include "mics/traces.hpp"
#include "mics/types.hpp"

namespace mics {

/// Dual-criticality periodic task with implicit deadline.
struct McTask {
  std::string id;
  Criticality criticality = Criticality::LC;
  Micros wcet_hi = 0;
  WcetLevels levels;  // HC: design-time LO levels; LC: one level equal to wcet_hi
  Micros period = 0;
  Micros deadline = 0;
  std::shared_ptr<const EmpiricalDistribution> distribution;
  std::shared_ptr<const ExecutionTrace> trace;

  bool is_hc() const { return criticality == Criticality::HC; }
  /// Budget used for LO-mode schedulability (level 1 for HC tasks).
  Micros lo_budget() const { return levels.top(); }
  Micros budget(Mode mode) const { return mode == Mode::HI && is_hc() ? wcet_hi : lo_budget(); }
  double p_ovrun() const { return levels.p_ovrun; }
};

McTask make_hc_task(std::string id, Micros period, Micros wcet_hi, WcetLevels levels);
McTask make_lc_task(std::string id, Micros period, Micros budget);

struct McTaskSet {
  std::vector<McTask> tasks;
  double gamma = 0.0;  // LC share retained in HI mode (0 = drop)

  /// Throws ConfigError on a broken invariant.
  void validate() const;
  /// lcm of all periods; throws HyperperiodOverflow.
  Micros hyperperiod() const;
};

double utilization(const McTaskSet& set, Criticality criticality, Mode mode);

/// Maximum LC utilization in LO mode:
///   min{1 - U_HC^LO, (1 - U_HC^HI) / (U_HC^LO + gamma (1 - U_HC^LO))}, floored at 0.
/// Throws InfeasibleHcLoad when u_hc_hi > 1.
double lc_utilization_bound(double u_hc_lo, double u_hc_hi, double gamma);

/// 1 - prod over HC tasks of (1 - p_ovrun).
double mode_switch_probability(std::span<const double> hc_overrun_probabilities);
double mode_switch_probability(const McTaskSet& set);

double system_goal(double u_lc_lo_max, double p_ms);

struct SchedPolicy {
  enum class Kind { DropLc, DegradeLc };
  Kind kind = Kind::DropLc;
  double gamma = 0.0;  // DegradeLc only

  static SchedPolicy drop() { return {Kind::DropLc, 0.0}; }
  static SchedPolicy degrade(double g) { return {Kind::DegradeLc, g}; }
  std::string name() const;
};

SchedPolicy parse_sched_policy(const std::string& text, double default_gamma);

struct EdfVdVerdict {
  bool schedulable = false;
  double x = 1.0;  // virtual-deadline factor
};

/// EDF-VD utilization test: x = U_HC^LO / (1 - U_LC^LO); schedulable iff
/// x <= 1 and x U_LC^LO + U_HC^HI (+ gamma U_LC^LO when degrading) <= 1.
EdfVdVerdict edfvd_test(double u_lc_lo, double u_hc_lo, double u_hc_hi, const SchedPolicy& policy);
EdfVdVerdict edfvd_test(const McTaskSet& set, const SchedPolicy& policy);

struct DesignReport {
  double u_hc_lo = 0, u_hc_hi = 0, u_lc_lo = 0;
  double u_lc_lo_max = 0;
  double p_ms_sys = 0;
  double system_goal = 0;
  bool edfvd_schedulable = false;
  double virtual_deadline_factor_x = 1.0;
  SchedPolicy policy;
};

DesignReport design_report(const McTaskSet& set, const SchedPolicy& policy);

}  // namespace mics
