#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "mics/traces.hpp"
#include "mics/types.hpp"

namespace mics {

/// Normal component, truncated to the regime's [lo_us, hi_us]. sd_us == 0 is a point mass.
struct NormalComponent {
  double weight = 1.0;
  double mean_us = 0.0;
  double sd_us = 0.0;
};

struct Regime {
  std::vector<NormalComponent> components;
  Micros lo_us = 1;
  Micros hi_us = 0;  // 0: bounded only by the task's wcet_hi
};

/// Markov chain over regimes. One job is drawn from the current regime, then
/// the chain steps once. Successive jobs are therefore correlated whenever
/// the self-transition probabilities are high.
struct RegimeModelSpec {
  std::vector<Regime> regimes;
  std::vector<std::vector<double>> transition;  // row-stochastic; empty for one regime
  std::size_t initial = 0;

  void validate() const;
};

/// Per-job execution-time generator for one task.
class ExecSource {
 public:
  virtual ~ExecSource() = default;
  virtual Micros next() = 0;
  /// How many times a replayed trace wrapped around (0 for other sources).
  virtual std::size_t wraps() const { return 0; }
};

std::unique_ptr<ExecSource> make_replay_source(std::shared_ptr<const ExecutionTrace> trace);
std::unique_ptr<ExecSource> make_bootstrap_source(std::shared_ptr<const EmpiricalDistribution> dist,
                                                  std::uint64_t seed);
/// Draws outside [1, wcet_hi] are redrawn, so every value is <= wcet_hi.
std::unique_ptr<ExecSource> make_regime_source(RegimeModelSpec spec, Micros wcet_hi,
                                               std::uint64_t seed);
std::unique_ptr<ExecSource> make_constant_source(Micros value);

/// n draws from a regime model, as a trace (for design-time analysis).
ExecutionTrace sample_trace(const RegimeModelSpec& spec, Micros wcet_hi, std::size_t n,
                            std::uint64_t seed, std::string label = {});

/// The first `jobs` samples of cyclic replay. Indices where a new cycle
/// begins (after the first) are appended to `cycle_starts` when non-null.
std::vector<Micros> replay_order(const ExecutionTrace& trace, std::size_t jobs,
                                 std::vector<std::size_t>* cycle_starts = nullptr);

}  // namespace mics
