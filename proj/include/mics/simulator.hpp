#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mics/exec_model.hpp"
#include "mics/mc_model.hpp"
#include "mics/types.hpp"

namespace mics {

/// What LC tasks do in HI mode: drop everything, or keep running with
/// periods stretched by 1/gamma.
struct LcHiPolicy {
  double gamma = 0.0;  // 0 = drop

  static LcHiPolicy drop() { return {0.0}; }
  static LcHiPolicy extend_period(double g) { return {g}; }
  bool drops() const { return gamma <= 0.0; }
  SchedPolicy as_sched_policy() const {
    return drops() ? SchedPolicy::drop() : SchedPolicy::degrade(gamma);
  }
  std::string name() const;
};
LcHiPolicy parse_lc_hi_policy(const std::string& text);

/// Picks the LO-mode level of an HC job at release.
class LevelSelector {
 public:
  virtual ~LevelSelector() = default;
  /// `levels` descending; `recent` holds the latest completed execution
  /// times, oldest first. Returns an index into `levels`.
  virtual std::size_t select(std::span<const Micros> levels, std::span<const Micros> recent) const = 0;
};

/// Smallest level >= the max of the recent execution times; level 1 when
/// there is no history or the max exceeds every level.
class WindowMaxSelector final : public LevelSelector {
 public:
  std::size_t select(std::span<const Micros> levels, std::span<const Micros> recent) const override;
};

enum class LevelPolicy { MultiLevel, TopLevelOnly };

struct Horizon {
  Micros us = 0;
  double hyperperiods = 0.0;

  static Horizon micros(Micros v) { return {v, 0.0}; }
  static Horizon hyperperiod_count(double k) { return {0, k}; }
};

struct SimConfig {
  McTaskSet task_set;
  Horizon horizon;
  std::uint64_t seed = 0;
  /// Synthetic execution models by task id. Tasks without one replay their
  /// trace, else bootstrap from their distribution, else run at their budget.
  std::map<std::string, RegimeModelSpec> exec_models;
  std::size_t level_window = 3;
  Micros level_overhead = 1;
  LcHiPolicy lc_policy_hi;
  LevelPolicy level_policy = LevelPolicy::MultiLevel;
  /// Scale LC release rates in LO mode so the LC utilization bound holds for
  /// the currently selected HC levels.
  bool scale_lc_admission = true;
  bool record_events = false;
  std::shared_ptr<const LevelSelector> selector;  // null: WindowMaxSelector

  void validate() const;
};

enum class SimEventKind { Release, Start, Preempt, Complete, LevelChange, ModeSwitch, Drop };
std::string_view to_string(SimEventKind kind);

struct SimEvent {
  Micros time = 0;
  SimEventKind kind = SimEventKind::Release;
  std::string task_id;
  std::string detail;
};

struct SimMetrics {
  double qos = 1.0;
  double util_waste = 0.0;
  double mode_switches_per_hyperperiod = 0.0;
  std::uint64_t mode_switches = 0;
  std::uint64_t hc_deadline_misses = 0;
  std::uint64_t hc_jobs_released = 0;
  std::uint64_t hc_jobs_completed = 0;
  std::uint64_t lc_deadline_misses = 0;
  std::uint64_t lc_jobs_nominal = 0;
  std::uint64_t lc_jobs_released = 0;
  std::uint64_t lc_jobs_completed = 0;
  std::uint64_t lc_jobs_dropped = 0;  // at mode switches
  std::uint64_t lc_jobs_revoked = 0;  // by LO-mode admission control
  std::uint64_t level_changes = 0;
  std::uint64_t trace_wraps = 0;
  Micros time_lo = 0;
  Micros time_hi = 0;
  Micros horizon_us = 0;
  Micros hyperperiod_us = 0;
  Micros end_time = 0;  // last event, after draining released jobs
  double x = 1.0;
  bool unverified = false;
};

struct SimResult {
  SimMetrics metrics;
  std::vector<SimEvent> events;  // empty unless record_events
};

SimResult run(const SimConfig& config);

/// CSV with header `time_us,event,task_id,detail`.
std::string event_log_csv(std::span<const SimEvent> events);

}  // namespace mics
