// Compiled with -mavx2; only reached through dispatch after a CPU check.

#include <immintrin.h>

#include <array>
#include <cstdint>
#include <limits>

#include "mics/kernels.hpp"

namespace mics::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256i load(const std::int64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

// Lanes where x lies outside [INT32_MIN, INT32_MAX].
inline __m256i outside_int32(__m256i x) {
  const __m256i hi = _mm256_set1_epi64x(std::numeric_limits<std::int32_t>::max());
  const __m256i lo = _mm256_set1_epi64x(std::numeric_limits<std::int32_t>::min());
  return _mm256_or_si256(_mm256_cmpgt_epi64(x, hi), _mm256_cmpgt_epi64(lo, x));
}

// counts * (points - pivot) + offset for four lanes; flags lanes whose
// operands do not fit the signed 32x32->64 multiply.
inline __m256i affine4(const std::int64_t* points, const std::int64_t* counts, __m256i pivot,
                       __m256i offset, __m256i& bad) {
  const __m256i d = _mm256_sub_epi64(load(points), pivot);
  const __m256i k = load(counts);
  bad = _mm256_or_si256(bad, _mm256_or_si256(outside_int32(d), outside_int32(k)));
  return _mm256_add_epi64(_mm256_mul_epi32(k, d), offset);
}

}  // namespace

ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset) {
  const std::size_t n = points.size();
  if (n < kLanes) return scalar::affine_step_argmin(points, counts, pivot, offset);

  const __m256i vpivot = _mm256_set1_epi64x(pivot);
  const __m256i voffset = _mm256_set1_epi64x(offset);
  const __m256i step = _mm256_set1_epi64x(kLanes);
  __m256i bad = _mm256_setzero_si256();

  __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i best_idx = idx;
  __m256i best = affine4(points.data(), counts.data(), vpivot, voffset, bad);

  std::size_t i = kLanes;
  for (; i + kLanes <= n; i += kLanes) {
    idx = _mm256_add_epi64(idx, step);
    const __m256i v = affine4(points.data() + i, counts.data() + i, vpivot, voffset, bad);
    const __m256i lt = _mm256_cmpgt_epi64(best, v);
    best = _mm256_blendv_epi8(best, v, lt);
    best_idx = _mm256_blendv_epi8(best_idx, idx, lt);
  }
  if (!_mm256_testz_si256(bad, bad)) {
    return scalar::affine_step_argmin(points, counts, pivot, offset);
  }

  alignas(32) std::array<std::int64_t, kLanes> vals{};
  alignas(32) std::array<std::int64_t, kLanes> idxs{};
  _mm256_store_si256(reinterpret_cast<__m256i*>(vals.data()), best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(idxs.data()), best_idx);

  ArgMin out{static_cast<std::size_t>(idxs[0]), vals[0]};
  for (std::size_t lane = 1; lane < kLanes; ++lane) {
    const auto li = static_cast<std::size_t>(idxs[lane]);
    if (vals[lane] < out.value || (vals[lane] == out.value && li < out.index)) {
      out = {li, vals[lane]};
    }
  }
  // Tail indices exceed every vector index, so a strict compare keeps the
  // first-minimum rule.
  for (; i < n; ++i) {
    const std::int64_t v = counts[i] * (points[i] - pivot) + offset;
    if (v < out.value) out = {i, v};
  }
  return out;
}

void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out) {
  const std::size_t n = points.size();
  const __m256i vpivot = _mm256_set1_epi64x(pivot);
  const __m256i voffset = _mm256_set1_epi64x(offset);
  __m256i bad = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i v = affine4(points.data() + i, counts.data() + i, vpivot, voffset, bad);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), v);
  }
  if (!_mm256_testz_si256(bad, bad)) {
    scalar::affine_step_eval(points, counts, pivot, offset, out);
    return;
  }
  for (; i < n; ++i) out[i] = counts[i] * (points[i] - pivot) + offset;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) std::array<double, kLanes> lanes{};
  _mm256_store_pd(lanes.data(), m);
  double out = 0.0;
  for (double v : lanes) out = v > out ? v : out;
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    const double ad = d < 0 ? -d : d;
    if (ad > out) out = ad;
  }
  return out;
}

}  // namespace mics::kernels::avx2
