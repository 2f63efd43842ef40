#pragma once

// Multiple low-WCET levels. Level 1 comes from derive_wcet_lo; each further
// level is the smallest interior minimizer of the scalable EET (SEET) below
// the previous level, with the earlier levels held fixed:
//
//   SEET(t) = alpha(t) t + sum_{i=2..m} (alpha(L_{i-1}) - alpha(L_i)) L_{i-1}
//             + (1 - alpha(L_1)) WCET^HI,            with L_m = t.
//
// Only level 1 triggers a mode switch, so p_ovrun always belongs to level 1.

#include <cstddef>
#include <vector>

#include "mics/anti_mics.hpp"
#include "mics/traces.hpp"
#include "mics/types.hpp"

namespace mics {

struct WcetLevels {
  std::vector<Micros> levels;    // strictly descending; levels[0] is the mode-switch boundary
  std::vector<double> coverage;  // alpha(levels[i]); empty when no distribution backs the levels
  double p_ovrun = 0.0;
  Micros wcet_hi = 0;

  Micros top() const { return levels.front(); }
  std::size_t size() const { return levels.size(); }

  /// Throws ConfigError if any invariant is broken.
  void validate() const;
};

/// Single-level family (LC budgets, fixed-ratio policies).
WcetLevels single_level(Micros level, Micros wcet_hi, double p_ovrun = 0.0);

/// SEET of candidate t below the levels already fixed in `so_far`.
/// Throws OutOfRange unless 0 <= t <= so_far.levels.back().
double seet(const EmpiricalDistribution& dist, const WcetLevels& so_far, Micros t);

struct LevelOptions {
  Micros period = 0;
  double min_util_gain = 0.05;
  std::size_t max_levels = 4;
  ScanOptions level1_scan{};
};

WcetLevels derive_levels(const EmpiricalDistribution& dist, const LevelOptions& options);

}  // namespace mics
