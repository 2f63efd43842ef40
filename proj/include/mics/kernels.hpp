#pragma once

// Data-parallel inner loops of the analyses. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant; `active_isa()`
// picks one at first use. All variants return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace mics::kernels {

struct ArgMin {
  std::size_t index = 0;
  std::int64_t value = 0;
};

// The affine-step form covers both EET and SEET, scaled by n:
//   value[i] = counts[i] * (points[i] - pivot) + offset
// The argmin returns the first index holding the minimum. Spans must be
// non-empty and equally sized.

namespace scalar {
ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset);
void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

#if defined(MICS_HAVE_AVX2_KERNELS)
namespace avx2 {
// The products are formed with 32x32->64 multiplies, so these two fall back
// to the scalar code when a count or (point - pivot) does not fit in int32.
ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset);
void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace avx2
#endif

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// ISA used by the dispatching entry points below. Honors MICS_KERNELS=scalar.
Isa active_isa();

/// Test hook: pins the dispatch to one ISA (nullopt restores auto-detection).
void force_isa(std::optional<Isa> isa);

ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset);
void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace mics::kernels
