#include <atomic>
#include <cstdlib>
#include <string_view>

#include "mics/kernels.hpp"

namespace mics::kernels {
namespace {

constexpr int kAuto = -1;
std::atomic<int> g_forced{kAuto};

Isa detect() {
  if (const char* env = std::getenv("MICS_KERNELS"); env && std::string_view(env) == "scalar") {
    return Isa::Scalar;
  }
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(MICS_HAVE_AVX2_KERNELS)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced != kAuto) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(std::optional<Isa> isa) {
  if (isa && *isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  g_forced.store(isa ? static_cast<int>(*isa) : kAuto, std::memory_order_relaxed);
}

ArgMin affine_step_argmin(std::span<const std::int64_t> points,
                          std::span<const std::int64_t> counts, std::int64_t pivot,
                          std::int64_t offset) {
#if defined(MICS_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::Avx2) return avx2::affine_step_argmin(points, counts, pivot, offset);
#endif
  return scalar::affine_step_argmin(points, counts, pivot, offset);
}

void affine_step_eval(std::span<const std::int64_t> points, std::span<const std::int64_t> counts,
                      std::int64_t pivot, std::int64_t offset, std::span<std::int64_t> out) {
#if defined(MICS_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::Avx2) return avx2::affine_step_eval(points, counts, pivot, offset, out);
#endif
  scalar::affine_step_eval(points, counts, pivot, offset, out);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
#if defined(MICS_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::Avx2) return avx2::max_abs_diff(a, b);
#endif
  return scalar::max_abs_diff(a, b);
}

}  // namespace mics::kernels
