#include "mics/exec_model.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "mics/error.hpp"

namespace mics {
namespace {

constexpr int kMaxRedraws = 10000;

class ReplaySource final : public ExecSource {
 public:
  explicit ReplaySource(std::shared_ptr<const ExecutionTrace> trace) : trace_(std::move(trace)) {
    if (!trace_ || trace_->samples.empty()) throw EmptyTrace();
  }
  Micros next() override {
    if (pos_ == trace_->samples.size()) {
      pos_ = 0;
      ++wraps_;
    }
    return trace_->samples[pos_++];
  }
  std::size_t wraps() const override { return wraps_; }

 private:
  std::shared_ptr<const ExecutionTrace> trace_;
  std::size_t pos_ = 0;
  std::size_t wraps_ = 0;
};

class BootstrapSource final : public ExecSource {
 public:
  BootstrapSource(std::shared_ptr<const EmpiricalDistribution> dist, std::uint64_t seed)
      : dist_(std::move(dist)), rng_(seed), pick_(0, dist_->n() - 1) {}
  Micros next() override { return dist_->sorted_samples()[pick_(rng_)]; }

 private:
  std::shared_ptr<const EmpiricalDistribution> dist_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
};

class RegimeSource final : public ExecSource {
 public:
  RegimeSource(RegimeModelSpec spec, Micros wcet_hi, std::uint64_t seed)
      : spec_(std::move(spec)), wcet_hi_(wcet_hi), rng_(seed), state_(spec_.initial) {
    spec_.validate();
  }

  Micros next() override {
    const Micros v = draw(spec_.regimes[state_]);
    if (!spec_.transition.empty()) state_ = step(spec_.transition[state_]);
    return v;
  }

 private:
  Micros draw(const Regime& r) {
    const Micros lo = std::max<Micros>(1, r.lo_us);
    const Micros hi = r.hi_us > 0 ? std::min(r.hi_us, wcet_hi_) : wcet_hi_;
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
      const NormalComponent& c = r.components[pick(r)];
      const double x = c.sd_us > 0.0 ? std::normal_distribution<double>(c.mean_us, c.sd_us)(rng_)
                                     : c.mean_us;
      const auto v = static_cast<Micros>(std::llround(x));
      if (v >= lo && v <= hi) return v;
    }
    throw ConfigError("regime model cannot produce values inside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }

  std::size_t pick(const Regime& r) {
    if (r.components.size() == 1) return 0;
    double total = 0.0;
    for (const auto& c : r.components) total += c.weight;
    double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
    for (std::size_t i = 0; i + 1 < r.components.size(); ++i) {
      if (u < r.components[i].weight) return i;
      u -= r.components[i].weight;
    }
    return r.components.size() - 1;
  }

  std::size_t step(const std::vector<double>& row) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    for (std::size_t j = 0; j + 1 < row.size(); ++j) {
      if (u < row[j]) return j;
      u -= row[j];
    }
    return row.size() - 1;
  }

  RegimeModelSpec spec_;
  Micros wcet_hi_;
  std::mt19937_64 rng_;
  std::size_t state_;
};

class ConstantSource final : public ExecSource {
 public:
  explicit ConstantSource(Micros v) : v_(v) {}
  Micros next() override { return v_; }

 private:
  Micros v_;
};

}  // namespace

void RegimeModelSpec::validate() const {
  if (regimes.empty()) throw ConfigError("regime model needs at least one regime");
  for (const auto& r : regimes) {
    if (r.components.empty()) throw ConfigError("regime needs at least one component");
    for (const auto& c : r.components) {
      if (!(c.weight > 0.0) || !(c.sd_us >= 0.0) || !std::isfinite(c.mean_us)) {
        throw ConfigError("regime component needs weight > 0, sd >= 0 and a finite mean");
      }
    }
  }
  if (initial >= regimes.size()) throw ConfigError("initial regime out of range");
  if (transition.empty()) {
    if (regimes.size() != 1) throw ConfigError("transition matrix required for several regimes");
    return;
  }
  if (transition.size() != regimes.size()) throw ConfigError("transition matrix size mismatch");
  for (const auto& row : transition) {
    if (row.size() != regimes.size()) throw ConfigError("transition matrix must be square");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ConfigError("transition probabilities must be non-negative");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("transition rows must sum to 1");
  }
}

std::unique_ptr<ExecSource> make_replay_source(std::shared_ptr<const ExecutionTrace> trace) {
  return std::make_unique<ReplaySource>(std::move(trace));
}

std::unique_ptr<ExecSource> make_bootstrap_source(std::shared_ptr<const EmpiricalDistribution> dist,
                                                  std::uint64_t seed) {
  return std::make_unique<BootstrapSource>(std::move(dist), seed);
}

std::unique_ptr<ExecSource> make_regime_source(RegimeModelSpec spec, Micros wcet_hi,
                                               std::uint64_t seed) {
  return std::make_unique<RegimeSource>(std::move(spec), wcet_hi, seed);
}

std::unique_ptr<ExecSource> make_constant_source(Micros value) {
  return std::make_unique<ConstantSource>(value);
}

ExecutionTrace sample_trace(const RegimeModelSpec& spec, Micros wcet_hi, std::size_t n,
                            std::uint64_t seed, std::string label) {
  RegimeSource src(spec, wcet_hi, seed);
  std::vector<Micros> samples(n);
  for (auto& s : samples) s = src.next();
  return make_trace(std::move(label), std::move(samples), "regime model, seed " + std::to_string(seed));
}

std::vector<Micros> replay_order(const ExecutionTrace& trace, std::size_t jobs,
                                 std::vector<std::size_t>* cycle_starts) {
  if (trace.samples.empty()) throw EmptyTrace();
  std::vector<Micros> out;
  out.reserve(jobs);
  const std::size_t len = trace.samples.size();
  for (std::size_t j = 0; j < jobs; ++j) {
    if (cycle_starts && j > 0 && j % len == 0) cycle_starts->push_back(j);
    out.push_back(trace.samples[j % len]);
  }
  return out;
}

}  // namespace mics
