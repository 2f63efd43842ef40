#pragma once

// Single low-WCET derivation from an empirical distribution.
//
// EET(t) = alpha(t) * t + (1 - alpha(t)) * WCET^HI weighs the samples that
// finish by t at t and the rest at WCET^HI. WCET^LO is the smallest t that
// minimizes EET and the overrun probability is 1 - alpha(WCET^LO).
//
// The published pseudo-code updates its running minimum on
// "EET_min <= EET(t)", which would track a maximizer; the argmin below is the
// intended reading.

#include <string>
#include <vector>

#include "mics/traces.hpp"
#include "mics/types.hpp"

namespace mics {

struct EetPoint {
  Micros t;
  double eet;
};

struct AntiMicsResult {
  Micros wcet_lo = 0;
  double p_ovrun = 0.0;
  double eet_min = 0.0;
  std::vector<EetPoint> eet_curve;  // filled when ScanOptions::keep_curve
};

struct ScanOptions {
  // EET is linear with slope alpha >= 0 between consecutive sample values, so
  // only sample values and WCET^HI can be minimizers. The uniform grid
  // (every scan_step us from scan_step up to WCET^HI, plus those points) is
  // kept for comparison with a brute-force scan.
  bool uniform_grid = false;
  Micros scan_step = 1;
  bool keep_curve = false;
};

/// Plain EET formula for a given coverage.
double eet_value(double alpha, double t, double wcet_hi);

/// EET over a distribution; throws OutOfRange unless 0 <= t <= wcet_hi.
double eet(const EmpiricalDistribution& dist, Micros t);

AntiMicsResult derive_wcet_lo(const EmpiricalDistribution& dist, const ScanOptions& options = {});

/// CSV with header `t_us,eet_us`.
std::string eet_curve_csv(const AntiMicsResult& result);

}  // namespace mics
