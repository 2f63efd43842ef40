#include "mics/multi_mics.hpp"

#include <cmath>
#include <string>

#include "mics/error.hpp"
#include "mics/kernels.hpp"

namespace mics {
namespace {

std::int64_t count_at(const EmpiricalDistribution& dist, Micros t) {
  return t >= dist.wcet_hi() ? static_cast<std::int64_t>(dist.n()) : dist.count_le(t);
}

// n * SEET(t) = k(t) * (t - L_last) + constant, where the constant collects
// every term that does not depend on t.
std::int64_t scaled_seet_constant(const EmpiricalDistribution& dist,
                                  const std::vector<Micros>& levels) {
  const auto n = static_cast<std::int64_t>(dist.n());
  std::int64_t c = count_at(dist, levels.back()) * levels.back();
  for (std::size_t i = 1; i < levels.size(); ++i) {
    c += (count_at(dist, levels[i - 1]) - count_at(dist, levels[i])) * levels[i - 1];
  }
  c += (n - count_at(dist, levels.front())) * dist.wcet_hi();
  return c;
}

}  // namespace

void WcetLevels::validate() const {
  if (levels.empty()) throw ConfigError("WCET levels must not be empty");
  if (levels.front() > wcet_hi) throw ConfigError("level 1 exceeds wcet_hi");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] <= 0) throw ConfigError("WCET levels must be positive");
    if (i > 0 && levels[i] >= levels[i - 1]) {
      throw ConfigError("WCET levels must be strictly descending");
    }
  }
  if (!(p_ovrun >= 0.0 && p_ovrun <= 1.0)) throw ConfigError("p_ovrun must lie in [0, 1]");
  if (coverage.empty()) return;
  if (coverage.size() != levels.size()) throw ConfigError("coverage/levels size mismatch");
  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (!(coverage[i] > 0.0 && coverage[i] <= 1.0)) throw ConfigError("coverage must lie in (0, 1]");
    if (i > 0 && coverage[i] >= coverage[i - 1]) {
      throw ConfigError("coverage must be strictly descending");
    }
  }
  if (std::fabs(p_ovrun - (1.0 - coverage.front())) > 1e-12) {
    throw ConfigError("p_ovrun != 1 - coverage[0]");
  }
}

WcetLevels single_level(Micros level, Micros wcet_hi, double p_ovrun) {
  WcetLevels l{{level}, {}, p_ovrun, wcet_hi};
  l.validate();
  return l;
}

double seet(const EmpiricalDistribution& dist, const WcetLevels& so_far, Micros t) {
  if (so_far.levels.empty()) throw ConfigError("SEET needs at least one fixed level");
  if (t < 0 || t > so_far.levels.back()) {
    throw OutOfRange(t, "SEET is defined on [0, " + std::to_string(so_far.levels.back()) + "]");
  }
  const Micros last = so_far.levels.back();
  const std::int64_t c = scaled_seet_constant(dist, so_far.levels);
  const std::int64_t scaled = count_at(dist, t) * (t - last) + c;
  return static_cast<double>(scaled) / static_cast<double>(dist.n());
}

WcetLevels derive_levels(const EmpiricalDistribution& dist, const LevelOptions& options) {
  if (options.period <= 0) throw ConfigError("period must be positive");
  if (!(options.min_util_gain > 0.0)) throw ConfigError("min_util_gain must be positive");
  if (options.max_levels < 1) throw ConfigError("max_levels must be at least 1");

  const auto n = static_cast<std::int64_t>(dist.n());
  const auto dn = static_cast<double>(n);
  const AntiMicsResult first = derive_wcet_lo(dist, options.level1_scan);

  WcetLevels out;
  out.wcet_hi = dist.wcet_hi();
  out.levels.push_back(first.wcet_lo);
  out.coverage.push_back(static_cast<double>(count_at(dist, first.wcet_lo)) / dn);
  out.p_ovrun = static_cast<double>(n - count_at(dist, first.wcet_lo)) / dn;

  const auto values = dist.distinct_values();
  const auto counts = dist.cumulative_counts();

  while (out.levels.size() < options.max_levels) {
    const Micros last = out.levels.back();
    // Interior candidates: sample values strictly below the last level.
    // Samples are positive, so alpha(0) = 0 and both scan endpoints
    // evaluate to the constant term.
    std::size_t m = 0;
    while (m < values.size() && values[m] < last) ++m;
    if (m == 0) break;

    const std::int64_t c = scaled_seet_constant(dist, out.levels);
    const auto best = kernels::affine_step_argmin(values.subspan(0, m), counts.subspan(0, m),
                                                  last, c);
    // Strict improvement by at least 1 us over the endpoints.
    if (best.value > c - n) break;

    const Micros candidate = values[best.index];
    const double gain =
        static_cast<double>(last - candidate) / static_cast<double>(options.period);
    if (gain < options.min_util_gain) break;

    out.levels.push_back(candidate);
    out.coverage.push_back(static_cast<double>(counts[best.index]) / dn);
  }
  out.validate();
  return out;
}

}  // namespace mics
