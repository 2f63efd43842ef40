#include <cmath>

#include "mics/kernels.hpp"

namespace mics::kernels::scalar {

ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset) {
  ArgMin best{0, counts[0] * (points[0] - pivot) + offset};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const std::int64_t v = counts[i] * (points[i] - pivot) + offset;
    if (v < best.value) best = {i, v};
  }
  return best;
}

void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = counts[i] * (points[i] - pivot) + offset;
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace mics::kernels::scalar
