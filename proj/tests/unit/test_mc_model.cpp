#include "doctest.h"
#include "mics/error.hpp"
#include "mics/mc_model.hpp"
#include "support/generators.hpp"

using namespace mics;

namespace {

McTaskSet set_of(std::vector<McTask> tasks, double gamma = 0.0) {
  McTaskSet s;
  s.tasks = std::move(tasks);
  s.gamma = gamma;
  return s;
}

}  // namespace

TEST_SUITE("mc_model") {

TEST_CASE("utilization") {
  const auto hc = make_hc_task("a", 120000, 48000, single_level(16600, 48000, 0.0902));
  CHECK(utilization(set_of({hc}), Criticality::HC, Mode::LO) == doctest::Approx(0.13833).epsilon(1e-4));
  CHECK(utilization(set_of({hc}), Criticality::HC, Mode::HI) == doctest::Approx(0.4));
  CHECK(utilization(set_of({hc}), Criticality::LC, Mode::LO) == 0.0);
  const auto s = set_of({make_lc_task("b", 100, 10), make_lc_task("c", 300, 30)});
  CHECK(utilization(s, Criticality::LC, Mode::LO) == doctest::Approx(0.2));
  CHECK(utilization(s, Criticality::LC, Mode::HI) == doctest::Approx(0.2));
}

TEST_CASE("task-set validation") {
  CHECK_THROWS_AS(set_of({make_lc_task("a", 10, 5), make_lc_task("a", 10, 5)}).validate(), ConfigError);
  CHECK_THROWS_AS(set_of({make_lc_task("a", 0, 5)}).validate(), ConfigError);
  CHECK_THROWS_AS(set_of({make_lc_task("a", 10, 5)}, 1.5).validate(), ConfigError);
  auto t = make_lc_task("a", 10, 5);
  t.deadline = 9;
  CHECK_THROWS_AS(set_of({t}).validate(), ConfigError);
}

TEST_CASE("hyper-period") {
  CHECK(set_of({make_lc_task("a", 4, 1), make_lc_task("b", 6, 1)}).hyperperiod() == 12);
  CHECK(set_of({}).hyperperiod() == 1);
  std::vector<McTask> primes;
  const Micros ps[] = {1000003, 1000033, 1000037, 1000039};
  for (int i = 0; i < 4; ++i) primes.push_back(make_lc_task("p" + std::to_string(i), ps[i], 1));
  CHECK_THROWS_AS(set_of(primes).hyperperiod(), HyperperiodOverflow);
}

TEST_CASE("LC utilization bound examples") {
  CHECK(lc_utilization_bound(0.4, 0.6, 0.0) == doctest::Approx(0.6));
  CHECK(lc_utilization_bound(1.0, 1.0, 0.3) == 0.0);
  CHECK(lc_utilization_bound(0.3, 0.8, 0.5) == doctest::Approx(0.2 / 0.65));
  CHECK(lc_utilization_bound(0.0, 0.0, 0.0) == 1.0);
  CHECK_THROWS_AS(lc_utilization_bound(0.5, 1.2, 0.0), InfeasibleHcLoad);
}

TEST_CASE("LC utilization bound is non-increasing in each argument (property)") {
  for (std::uint64_t c = 0; c < 2000; ++c) {
    auto rng = testgen::case_rng(51, c);
    const double hi = rng.real(0, 1), lo = rng.real(0, hi), g = rng.real(0, 1);
    const double b = lc_utilization_bound(lo, hi, g);
    CAPTURE(c);
    CHECK(b >= 0.0);
    CHECK(lc_utilization_bound(rng.real(lo, hi), hi, g) <= b + 1e-12);
    CHECK(lc_utilization_bound(lo, rng.real(hi, 1), g) <= b + 1e-12);
    CHECK(lc_utilization_bound(lo, hi, rng.real(g, 1)) <= b + 1e-12);
  }
}

TEST_CASE("mode-switch probability examples") {
  const std::vector<double> table{0.0387, 0.0719, 0.0229, 0.0413, 0.0902};
  CHECK(std::fabs(mode_switch_probability(table) - 0.2396) <= 0.0005);
  CHECK(mode_switch_probability(std::vector<double>{}) == 0.0);
  CHECK(mode_switch_probability(std::vector<double>{1.0}) == 1.0);
  auto hc = make_hc_task("h", 100, 50, single_level(20, 50, 0.25));
  const auto lc = make_lc_task("l", 100, 10);
  CHECK(mode_switch_probability(set_of({hc, lc})) == doctest::Approx(0.25));
}

TEST_CASE("mode-switch probability: monotone, and matches simulated independent overruns") {
  for (std::uint64_t c = 0; c < 200; ++c) {
    auto rng = testgen::case_rng(52, c);
    std::vector<double> p(static_cast<std::size_t>(rng.between(1, 10)));
    for (auto& v : p) v = rng.real(0, 0.3);
    const double base = mode_switch_probability(p);
    auto bumped = p;
    const auto i = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(p.size()) - 1));
    bumped[i] = rng.real(p[i], 1.0);
    CAPTURE(c);
    CHECK(mode_switch_probability(bumped) >= base - 1e-15);

    if (c < 20) {
      const int trials = 20000;
      int any = 0;
      for (int t = 0; t < trials; ++t) {
        bool hit = false;
        for (double q : p) hit |= rng.coin(q);
        any += hit ? 1 : 0;
      }
      const double est = static_cast<double>(any) / trials;
      const double sigma = std::sqrt(base * (1 - base) / trials);
      // 4 sigma per case keeps the family-wise false alarm rate near 0.1%.
      CHECK(std::fabs(est - base) <= 4 * sigma + 1e-9);
    }
  }
}

TEST_CASE("system goal") {
  CHECK(std::fabs(system_goal(0.8141, 0.2396) - 0.619) <= 0.001);
  CHECK(system_goal(0.7, 1.0) == 0.0);
  CHECK(system_goal(0.0, 0.3) == 0.0);
}

TEST_CASE("EDF-VD examples") {
  const auto v = edfvd_test(0.3, 0.35, 0.5, SchedPolicy::drop());
  CHECK(v.schedulable);
  CHECK(v.x == doctest::Approx(0.5));
  CHECK_FALSE(edfvd_test(0.6, 0.5, 0.6, SchedPolicy::drop()).schedulable);
  CHECK(edfvd_test(0.6, 0.5, 0.6, SchedPolicy::drop()).x == 1.0);
  CHECK_FALSE(edfvd_test(0.1, 0.2, 1.0, SchedPolicy::drop()).schedulable);
  // gamma = 0.5 adds half the LC load in HI mode.
  CHECK(edfvd_test(0.4, 0.2, 0.75, SchedPolicy::drop()).schedulable);
  CHECK_FALSE(edfvd_test(0.4, 0.2, 0.75, SchedPolicy::degrade(0.5)).schedulable);
}

TEST_CASE("EDF-VD accepts everything with bound <= 0.5 (property)") {
  for (std::uint64_t c = 0; c < 5000; ++c) {
    auto rng = testgen::case_rng(53, c);
    const double hi = rng.real(0, 0.5), lo = rng.real(0, hi), lc = rng.real(0, 0.5 - lo);
    CAPTURE(c);
    CHECK(edfvd_test(lc, lo, hi, SchedPolicy::drop()).schedulable);
  }
}

TEST_CASE("EDF-VD verdicts respect the stated conditions (property)") {
  for (std::uint64_t c = 0; c < 5000; ++c) {
    auto rng = testgen::case_rng(54, c);
    const double hi = rng.real(0, 1.1), lo = rng.real(0, hi), lc = rng.real(0, 1);
    const double g = rng.coin() ? 0.0 : rng.real(0, 1);
    const auto pol = g > 0 ? SchedPolicy::degrade(g) : SchedPolicy::drop();
    const auto v = edfvd_test(lc, lo, hi, pol);
    CAPTURE(c);
    if (v.schedulable) {
      CHECK(v.x > 0.0);
      CHECK(v.x <= 1.0);
      CHECK(lo / v.x + lc <= 1.0 + 1e-9);
      CHECK(v.x * lc + hi + g * lc <= 1.0 + 1e-9);
      // Accepted sets always fit under the LC bound.
      CHECK(lc <= lc_utilization_bound(lo, std::min(hi, 1.0), g) + 1e-9);
    }
  }
}

TEST_CASE("design report") {
  const auto s = set_of({make_hc_task("a", 100, 60, single_level(30, 60, 0.1)),
                         make_hc_task("b", 200, 40, single_level(20, 40, 0.2)),
                         make_lc_task("c", 100, 20)});
  const auto r = design_report(s, SchedPolicy::drop());
  CHECK(r.u_hc_lo == doctest::Approx(0.4));
  CHECK(r.u_hc_hi == doctest::Approx(0.8));
  CHECK(r.u_lc_lo == doctest::Approx(0.2));
  CHECK(r.p_ms_sys == doctest::Approx(1 - 0.9 * 0.8));
  CHECK(r.u_lc_lo_max == lc_utilization_bound(r.u_hc_lo, r.u_hc_hi, 0.0));
  CHECK(r.system_goal == r.u_lc_lo_max * (1.0 - r.p_ms_sys));
  CHECK(r.edfvd_schedulable == edfvd_test(s, SchedPolicy::drop()).schedulable);
}

TEST_CASE("policy parsing") {
  CHECK(parse_sched_policy("drop", 0.3).kind == SchedPolicy::Kind::DropLc);
  CHECK(parse_sched_policy("degrade", 0.3).gamma == 0.3);
  CHECK(parse_sched_policy("degrade:0.5", 0.3).gamma == 0.5);
  CHECK_THROWS_AS(parse_sched_policy("degrade:2", 0.3), ConfigError);
  CHECK_THROWS_AS(parse_sched_policy("fifo", 0.3), ConfigError);
}

}
