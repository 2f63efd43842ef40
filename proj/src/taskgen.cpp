#include "mics/taskgen.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <memory>
#include <optional>

#include "mics/anti_mics.hpp"
#include "mics/error.hpp"
#include "mics/exec_model.hpp"
#include "mics/format.hpp"
#include "mics/seed.hpp"

namespace mics {

DistributionShape parse_distribution_shape(const std::string& text) {
  if (text == "unimodal") return DistributionShape::Unimodal;
  if (text == "bimodal") return DistributionShape::Bimodal;
  if (text == "trimodal") return DistributionShape::Trimodal;
  throw ConfigError("unknown distribution shape '" + text + "'");
}

std::string_view to_string(DistributionShape shape) {
  switch (shape) {
    case DistributionShape::Unimodal: return "unimodal";
    case DistributionShape::Bimodal: return "bimodal";
    case DistributionShape::Trimodal: return "trimodal";
  }
  return "?";
}

std::vector<MixtureComponent> default_mixture(DistributionShape shape) {
  switch (shape) {
    case DistributionShape::Unimodal: return {{1.0, 0.4, 0.08}};
    case DistributionShape::Bimodal: return {{0.65, 0.2, 0.05}, {0.35, 0.6, 0.05}};
    case DistributionShape::Trimodal: return {{0.5, 0.15, 0.04}, {0.3, 0.45, 0.05}, {0.2, 0.75, 0.05}};
  }
  return {};
}

std::vector<double> default_u_bound_targets() {
  std::vector<double> out;
  for (int i = 1; i <= 20; ++i) out.push_back(i * 5 / 100.0);
  return out;
}

void GenSpec::validate() const {
  if (u_bound_targets.empty()) throw ConfigError("u_bound_targets must not be empty");
  for (double u : u_bound_targets) {
    if (!(u > 0.0 && u <= 1.0)) throw ConfigError("u_bound targets must lie in (0, 1]");
  }
  if (sets_per_point < 1) throw ConfigError("sets_per_point must be >= 1");
  if (wcet_hi_min < 1 || wcet_hi_min > wcet_hi_max) throw ConfigError("empty wcet_hi range");
  if (!(hc_probability >= 0.0 && hc_probability <= 1.0)) {
    throw ConfigError("hc_probability must lie in [0, 1]");
  }
  if (!(util_min > 0.0 && util_min <= util_max && util_max <= 1.0)) {
    throw ConfigError("per-task utilization range must satisfy 0 < low <= high <= 1");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  for (const auto& c : effective_mixture()) {
    if (!(c.weight > 0.0) || !(c.sd_frac >= 0.0) || !(c.mean_frac > 0.0)) {
      throw ConfigError("mixture components need weight > 0, mean > 0 and sd >= 0");
    }
  }
  for (Micros p : period_choices) {
    if (p < 1) throw ConfigError("period choices must be positive");
  }
  if (!(min_util_gain >= 0.0) || max_levels < 1) throw ConfigError("bad multi-level options");
}

std::vector<MixtureComponent> GenSpec::effective_mixture() const {
  return mixture.empty() ? default_mixture(shape) : mixture;
}

SchedPolicy GenSpec::sched_policy() const {
  return gamma > 0.0 ? SchedPolicy::degrade(gamma) : SchedPolicy::drop();
}

namespace {

double bound_of(const McTaskSet& set) {
  const double lo = utilization(set, Criticality::HC, Mode::LO) + utilization(set, Criticality::LC, Mode::LO);
  return std::max(lo, utilization(set, Criticality::HC, Mode::HI));
}

std::string task_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%02zu", i);
  return buf;
}

}  // namespace

McTaskSet generate_task_set(const GenSpec& spec, double u_bound, std::mt19937_64& rng) {
  if (!(u_bound > 0.0 && u_bound <= 1.0)) throw ConfigError("u_bound must lie in (0, 1]");
  McTaskSet set;
  set.gamma = spec.gamma;
  const auto mixture = spec.effective_mixture();
  std::uniform_real_distribution<double> util(spec.util_min, spec.util_max);
  std::bernoulli_distribution is_hc(spec.hc_probability);
  std::uniform_int_distribution<Micros> wcet(spec.wcet_hi_min, spec.wcet_hi_max);
  std::uniform_int_distribution<std::size_t> choice(0, spec.period_choices.empty() ? 0 : spec.period_choices.size() - 1);

  while (true) {
    const double u = util(rng);
    const bool hc = is_hc(rng);
    Micros hi = 0, period = 0;
    if (spec.period_choices.empty()) {
      hi = wcet(rng);
      period = std::max<Micros>(1, std::llround(static_cast<double>(hi) / u));
    } else {
      period = spec.period_choices[choice(rng)];
      hi = std::max<Micros>(1, std::llround(u * static_cast<double>(period)));
    }
    const std::uint64_t sample_seed = rng();

    const std::string id = task_id(set.tasks.size());
    McTask task = hc ? make_hc_task(id, period, hi,
                                    single_level(std::max<Micros>(1, std::llround(hi / 2.0)), hi))
                     : make_lc_task(id, period, hi);
    set.tasks.push_back(task);
    if (bound_of(set) > u_bound) {
      set.tasks.pop_back();
      break;
    }
    if (spec.samples_per_task > 0) {
      RegimeModelSpec model;
      Regime regime;
      for (const auto& c : mixture) {
        regime.components.push_back({c.weight, c.mean_frac * static_cast<double>(hi),
                                     c.sd_frac * static_cast<double>(hi)});
      }
      model.regimes.push_back(std::move(regime));
      auto trace = std::make_shared<const ExecutionTrace>(
          sample_trace(model, hi, spec.samples_per_task, sample_seed, id));
      McTask& added = set.tasks.back();
      added.trace = trace;
      added.distribution = std::make_shared<const EmpiricalDistribution>(*trace, hi);
    }
  }
  return set;
}

std::string WcetPolicy::name() const {
  switch (kind) {
    case Kind::AntiMics: return "anti_mics";
    case Kind::MultiMics: return "multi_mics";
    case Kind::Lambda: return "lambda(" + format_double(param) + ")";
    case Kind::MeanPlusNSigma: return "mean_plus_nsigma(" + format_double(param) + ")";
  }
  return "?";
}

namespace {

double parse_ratio(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
      const double a = std::stod(num, &used);
      if (used == num.size()) {
        const double b = std::stod(den, &used);
        if (used == den.size() && b != 0.0) return a / b;
      }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("bad numeric argument '" + text + "'");
}

}  // namespace

WcetPolicy parse_wcet_policy(const std::string& text) {
  if (text == "anti_mics") return WcetPolicy::anti_mics();
  if (text == "multi_mics") return WcetPolicy::multi_mics();
  auto arg = [&](const std::string& head) -> std::optional<std::string> {
    if (text.size() > head.size() + 2 && text.rfind(head + "(", 0) == 0 && text.back() == ')') {
      return text.substr(head.size() + 1, text.size() - head.size() - 2);
    }
    return std::nullopt;
  };
  if (auto a = arg("lambda")) {
    const double r = parse_ratio(*a);
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("lambda ratio must lie in (0, 1]");
    return WcetPolicy::lambda(r);
  }
  if (auto a = arg("mean_plus_nsigma")) {
    const double n = parse_ratio(*a);
    if (!(n >= 0.0)) throw ConfigError("mean_plus_nsigma needs n >= 0");
    return WcetPolicy::mean_plus_nsigma(n);
  }
  throw ConfigError("unknown WCET policy '" + text + "'");
}

McTaskSet assign_wcet_lo(const McTaskSet& set, const WcetPolicy& policy, const GenSpec& spec) {
  McTaskSet out = set;
  for (McTask& t : out.tasks) {
    if (!t.is_hc()) continue;
    const auto& dist = t.distribution;
    const bool needs_dist = policy.kind != WcetPolicy::Kind::Lambda;
    if (needs_dist && !dist) throw MissingDistribution(t.id);
    switch (policy.kind) {
      case WcetPolicy::Kind::AntiMics: {
        const AntiMicsResult r = derive_wcet_lo(*dist);
        t.levels = WcetLevels{{r.wcet_lo}, {dist->alpha(r.wcet_lo)}, r.p_ovrun, t.wcet_hi};
        break;
      }
      case WcetPolicy::Kind::MultiMics: {
        LevelOptions opts;
        opts.period = t.period;
        opts.min_util_gain = spec.min_util_gain;
        opts.max_levels = spec.max_levels;
        t.levels = derive_levels(*dist, opts);
        break;
      }
      case WcetPolicy::Kind::Lambda:
      case WcetPolicy::Kind::MeanPlusNSigma: {
        const double raw = policy.kind == WcetPolicy::Kind::Lambda
                               ? policy.param * static_cast<double>(t.wcet_hi)
                               : dist->mean() + policy.param * dist->stddev();
        const Micros level = std::clamp<Micros>(std::llround(raw), 1, t.wcet_hi);
        t.levels = single_level(level, t.wcet_hi, dist ? overrun_fraction(*dist, level) : 0.0);
        break;
      }
    }
    t.levels.validate();
  }
  return out;
}

SweepResult sweep(const GenSpec& spec, const std::vector<WcetPolicy>& policies) {
  spec.validate();
  SweepResult result;
  const SchedPolicy sched = spec.sched_policy();
  for (std::size_t i = 0; i < spec.u_bound_targets.size(); ++i) {
    const double target = spec.u_bound_targets[i];
    std::vector<std::size_t> accepted(policies.size(), 0);
    for (std::size_t r = 0; r < spec.sets_per_point; ++r) {
      std::mt19937_64 rng(sub_seed(spec.seed, i * spec.sets_per_point + r));
      const McTaskSet set = generate_task_set(spec, target, rng);
      for (std::size_t p = 0; p < policies.size(); ++p) {
        if (edfvd_test(assign_wcet_lo(set, policies[p], spec), sched).schedulable) ++accepted[p];
      }
    }
    for (std::size_t p = 0; p < policies.size(); ++p) {
      result.points.push_back({target, policies[p].name(),
                               static_cast<double>(accepted[p]) / static_cast<double>(spec.sets_per_point),
                               spec.sets_per_point});
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "u_bound,policy,acceptance_ratio\n";
  for (const auto& p : result.points) {
    out += format_double(p.u_bound) + "," + p.policy + "," + format_double(p.acceptance_ratio) + "\n";
  }
  return out;
}

}  // namespace mics
