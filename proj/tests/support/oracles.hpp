#pragma once
// Independent reference computations. These work straight from the
// definitions (direct counting, exhaustive scans) and share no code with the
// library beyond the integer time type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mics/types.hpp"

namespace oracle {

using mics::Micros;

inline std::int64_t count_le(const std::vector<Micros>& samples, Micros t) {
  std::int64_t k = 0;
  for (Micros v : samples) k += v <= t ? 1 : 0;
  return k;
}

inline double alpha(const std::vector<Micros>& samples, Micros t) {
  return static_cast<double>(count_le(samples, t)) / static_cast<double>(samples.size());
}

// n * EET(t) = k t + (n - k) hi, exact.
inline std::int64_t scaled_eet(const std::vector<Micros>& samples, Micros hi, Micros t) {
  const auto n = static_cast<std::int64_t>(samples.size());
  const std::int64_t k = t >= hi ? n : count_le(samples, t);
  return k * t + (n - k) * hi;
}

inline double eet(const std::vector<Micros>& samples, Micros hi, Micros t) {
  return static_cast<double>(scaled_eet(samples, hi, t)) / static_cast<double>(samples.size());
}

struct Minimum {
  Micros t = 0;
  std::int64_t scaled = 0;
};

// Smallest minimizer over every distinct sample value and wcet_hi.
inline Minimum wcet_lo_over_samples(const std::vector<Micros>& samples, Micros hi) {
  std::vector<Micros> pts = samples;
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Minimum best{0, std::numeric_limits<std::int64_t>::max()};
  for (Micros t : pts) {
    const std::int64_t v = scaled_eet(samples, hi, t);
    if (v < best.scaled) best = {t, v};
  }
  return best;
}

// Algorithm-1 style: every integer t from 1 to wcet_hi.
inline Minimum wcet_lo_every_integer(const std::vector<Micros>& samples, Micros hi) {
  Minimum best{0, std::numeric_limits<std::int64_t>::max()};
  for (Micros t = 1; t <= hi; ++t) {
    const std::int64_t v = scaled_eet(samples, hi, t);
    if (v < best.scaled) best = {t, v};
  }
  return best;
}

// n * SEET(t) straight from the definition with L_m = t:
//   k(t) t + sum_{i=2..m} (k(L_{i-1}) - k(L_i)) L_{i-1} + (n - k(L_1)) hi
inline std::int64_t scaled_seet(const std::vector<Micros>& samples, Micros hi,
                                const std::vector<Micros>& fixed_levels, Micros t) {
  const auto n = static_cast<std::int64_t>(samples.size());
  std::vector<Micros> L = fixed_levels;
  L.push_back(t);
  std::int64_t total = count_le(samples, t) * t;
  for (std::size_t i = 1; i < L.size(); ++i) {
    total += (count_le(samples, L[i - 1]) - count_le(samples, L[i])) * L[i - 1];
  }
  total += (n - count_le(samples, L[0])) * hi;
  return total;
}

struct Levels {
  std::vector<Micros> levels;
  double p_ovrun = 0.0;
};

// Brute-force level derivation: every integer candidate below the last level.
inline Levels levels(const std::vector<Micros>& samples, Micros hi, Micros period, double min_gain,
                     std::size_t max_levels) {
  const auto n = static_cast<std::int64_t>(samples.size());
  Levels out;
  out.levels.push_back(wcet_lo_over_samples(samples, hi).t);
  out.p_ovrun = static_cast<double>(n - count_le(samples, out.levels[0])) / static_cast<double>(n);
  while (out.levels.size() < max_levels) {
    const Micros last = out.levels.back();
    const std::int64_t endpoint = scaled_seet(samples, hi, out.levels, last);
    Minimum best{0, std::numeric_limits<std::int64_t>::max()};
    for (Micros t = 1; t < last; ++t) {
      const std::int64_t v = scaled_seet(samples, hi, out.levels, t);
      if (v < best.scaled) best = {t, v};
    }
    if (best.t == 0 || best.scaled > endpoint - n) break;
    if (static_cast<double>(last - best.t) / static_cast<double>(period) < min_gain) break;
    out.levels.push_back(best.t);
  }
  return out;
}

inline double mean(const std::vector<Micros>& v) {
  double s = 0;
  for (Micros x : v) s += static_cast<double>(x);
  return s / static_cast<double>(v.size());
}

inline double population_sd(const std::vector<Micros>& v) {
  const double m = mean(v);
  double s = 0;
  for (Micros x : v) s += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace oracle
