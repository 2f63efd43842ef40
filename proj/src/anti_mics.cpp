#include "mics/anti_mics.hpp"

#include <algorithm>
#include <charconv>

#include "mics/error.hpp"
#include "mics/format.hpp"
#include "mics/kernels.hpp"

namespace mics {
namespace {

// Candidate points and their sample counts, ascending, alpha(t) > 0 only.
struct Grid {
  std::vector<std::int64_t> points;
  std::vector<std::int64_t> counts;
};

Grid sample_grid(const EmpiricalDistribution& dist) {
  Grid g;
  const auto values = dist.distinct_values();
  const auto counts = dist.cumulative_counts();
  g.points.assign(values.begin(), values.end());
  g.counts.assign(counts.begin(), counts.end());
  if (g.points.back() != dist.wcet_hi()) {
    g.points.push_back(dist.wcet_hi());
    g.counts.push_back(static_cast<std::int64_t>(dist.n()));
  }
  return g;
}

Grid uniform_grid(const EmpiricalDistribution& dist, Micros step) {
  const auto values = dist.distinct_values();
  const auto counts = dist.cumulative_counts();
  const Micros hi = dist.wcet_hi();
  Grid g;
  std::size_t j = 0;  // next distinct value not yet emitted
  std::int64_t k = 0;
  auto emit = [&](Micros t) {
    while (j < values.size() && values[j] <= t) k = counts[j++];
    if (k > 0 && (g.points.empty() || g.points.back() != t)) {
      g.points.push_back(t);
      g.counts.push_back(k);
    }
  };
  for (Micros t = step; t <= hi; t += step) {
    while (j < values.size() && values[j] < t) emit(values[j]);
    emit(t);
  }
  while (j < values.size()) emit(values[j]);
  emit(hi);
  return g;
}

}  // namespace

double eet_value(double alpha, double t, double wcet_hi) {
  return alpha * t + (1.0 - alpha) * wcet_hi;
}

double eet(const EmpiricalDistribution& dist, Micros t) {
  if (t < 0 || t > dist.wcet_hi()) throw OutOfRange(t, "EET is defined on [0, wcet_hi]");
  const auto n = static_cast<std::int64_t>(dist.n());
  const std::int64_t k = t == dist.wcet_hi() ? n : dist.count_le(t);
  const std::int64_t scaled = k * (t - dist.wcet_hi()) + n * dist.wcet_hi();
  return static_cast<double>(scaled) / static_cast<double>(n);
}

AntiMicsResult derive_wcet_lo(const EmpiricalDistribution& dist, const ScanOptions& options) {
  if (options.uniform_grid && options.scan_step < 1) {
    throw ConfigError("scan_step must be at least 1 us");
  }
  const Grid grid = options.uniform_grid ? uniform_grid(dist, options.scan_step) : sample_grid(dist);
  const auto n = static_cast<std::int64_t>(dist.n());
  const Micros hi = dist.wcet_hi();
  const auto dn = static_cast<double>(n);

  const auto best = kernels::affine_step_argmin(grid.points, grid.counts, hi, n * hi);

  AntiMicsResult r;
  r.wcet_lo = grid.points[best.index];
  r.p_ovrun = static_cast<double>(n - grid.counts[best.index]) / dn;
  r.eet_min = static_cast<double>(best.value) / dn;

  if (options.keep_curve) {
    std::vector<std::int64_t> scaled(grid.points.size());
    kernels::affine_step_eval(grid.points, grid.counts, hi, n * hi, scaled);
    r.eet_curve.reserve(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      r.eet_curve.push_back({grid.points[i], static_cast<double>(scaled[i]) / dn});
    }
  }
  return r;
}

std::string eet_curve_csv(const AntiMicsResult& result) {
  std::string out = "t_us,eet_us\n";
  for (const auto& p : result.eet_curve) {
    out += std::to_string(p.t);
    out += ',';
    out += format_double(p.eet);
    out += '\n';
  }
  return out;
}

}  // namespace mics
