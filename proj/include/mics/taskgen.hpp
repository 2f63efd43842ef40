#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mics/mc_model.hpp"
#include "mics/multi_mics.hpp"
#include "mics/types.hpp"

namespace mics {

/// Truncated-normal mixture component, in fractions of the task's wcet_hi.
struct MixtureComponent {
  double weight = 1.0;
  double mean_frac = 0.5;
  double sd_frac = 0.05;
};

enum class DistributionShape { Unimodal, Bimodal, Trimodal };
DistributionShape parse_distribution_shape(const std::string& text);
std::string_view to_string(DistributionShape shape);
std::vector<MixtureComponent> default_mixture(DistributionShape shape);

std::vector<double> default_u_bound_targets();  // 0.05, 0.10, ..., 1.00

struct GenSpec {
  std::vector<double> u_bound_targets = default_u_bound_targets();
  std::size_t sets_per_point = 1000;
  Micros wcet_hi_min = 52000;
  Micros wcet_hi_max = 1142000;
  double hc_probability = 0.5;
  double util_min = 0.05;
  double util_max = 0.25;
  DistributionShape shape = DistributionShape::Bimodal;
  std::vector<MixtureComponent> mixture;  // overrides `shape` when non-empty
  std::size_t samples_per_task = 1000;    // 0: no distributions attached
  std::uint64_t seed = 0;
  double gamma = 0.0;  // > 0 tests with degraded LC service instead of dropping
  /// When non-empty, periods are drawn from this list and wcet_hi = round(u * period)
  /// instead of drawing wcet_hi from its range (keeps hyper-periods small).
  std::vector<Micros> period_choices;
  double min_util_gain = 0.05;  // multi_mics stopping rule
  std::size_t max_levels = 4;

  void validate() const;
  std::vector<MixtureComponent> effective_mixture() const;
  SchedPolicy sched_policy() const;
};

/// Adds random tasks until the next one would push
/// max(U_HC^LO + U_LC, U_HC^HI) above u_bound, with provisional HC levels of
/// wcet_hi / 2. Ids are t00, t01, ...
McTaskSet generate_task_set(const GenSpec& spec, double u_bound, std::mt19937_64& rng);

struct WcetPolicy {
  enum class Kind { AntiMics, MultiMics, Lambda, MeanPlusNSigma };
  Kind kind = Kind::AntiMics;
  double param = 0.0;  // ratio for Lambda, n for MeanPlusNSigma

  static WcetPolicy anti_mics() { return {Kind::AntiMics, 0.0}; }
  static WcetPolicy multi_mics() { return {Kind::MultiMics, 0.0}; }
  static WcetPolicy lambda(double r) { return {Kind::Lambda, r}; }
  static WcetPolicy mean_plus_nsigma(double n) { return {Kind::MeanPlusNSigma, n}; }
  std::string name() const;
};
/// Accepts anti_mics, multi_mics, lambda(r) and mean_plus_nsigma(n); r may be a fraction like 1/2.
WcetPolicy parse_wcet_policy(const std::string& text);

/// Reassigns HC levels per policy; LC tasks are left alone. Throws
/// MissingDistribution when a policy needs a distribution the task lacks.
McTaskSet assign_wcet_lo(const McTaskSet& set, const WcetPolicy& policy, const GenSpec& spec = {});

struct SweepPoint {
  double u_bound = 0.0;
  std::string policy;
  double acceptance_ratio = 0.0;
  std::size_t sets = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // by u_bound, then policy in the order given
};

/// Every policy sees the same generated sets: set r of target i is drawn
/// from sub_seed(spec.seed, i * sets_per_point + r).
SweepResult sweep(const GenSpec& spec, const std::vector<WcetPolicy>& policies);

/// CSV with header `u_bound,policy,acceptance_ratio`.
std::string sweep_csv(const SweepResult& result);

}  // namespace mics
