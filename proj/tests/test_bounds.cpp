#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lemma_suites.hpp"
#include "nuh/bounds.hpp"
#include "nuh/errors.hpp"
#include "nuh/estimator.hpp"

using namespace nuh;
using nuh::testing::random_point;
using nuh::testing::random_unit;

namespace {

constexpr double kPi = std::numbers::pi;

double one_step_average(const EndoMap& f, Vec2 x, Vec2 v) {
  double s = 0.0;
  const auto ys = f.preimages(x);
  for (const Vec2& y : ys) s += std::log(max_norm(f.inverse_derivative(y) * v));
  return s / static_cast<double>(ys.size());
}

}  // namespace

TEST_CASE("family constants") {
  const BoundInputs inp = BoundInputs::for_family(2, 100.0);
  CHECK(inp.tau2 == 5);
  CHECK(inp.alpha == 2.0);
  CHECK(inp.a == doctest::Approx(2 * kPi * std::sin(kPi / 10)));
  CHECK(inp.b == doctest::Approx(2 * kPi));
  CHECK(inp.e_v == doctest::Approx(0.2));
  CHECK(inp.e_h == doctest::Approx(0.1));
  const BoundInputs viamap = BoundInputs::for_map(EndoMap::standard_family(2, 100.0));
  CHECK(viamap.a == inp.a);
  CHECK(viamap.e_h == inp.e_h);
  CHECK(good_half_count(5) == 2);
  CHECK(good_half_count(7) == 3);
}

TEST_CASE("layer bounds lie below measured one-step averages") {
  for (double t : {3.0, 50.0, 1042.0}) {
    const EndoMap f = EndoMap::standard_family(2, t);
    const LayerBounds lb = layer_bounds(BoundInputs::for_map(f));
    std::size_t vertical_seen = 0, horizontal_seen = 0;
    for (std::uint64_t k = 0; k < 2000; ++k) {
      CounterRng rng(61, k);
      const Vec2 x = random_point(rng);
      const Vec2 v = random_unit(rng);
      const double avg = one_step_average(f, x, v);
      if (in_vertical_cone(v, f.alpha())) {
        ++vertical_seen;
        CHECK(avg >= lb.vertical);
      } else {
        ++horizontal_seen;
        CHECK(avg >= lb.horizontal);
      }
    }
    CHECK(vertical_seen > 500);
    CHECK(horizontal_seen > 500);
  }
  CHECK_THROWS_AS(layer_bounds(BoundInputs::for_family(2, 2.0)), MapError);
}

TEST_CASE("certificate is the stationary mix of the layer bounds") {
  for (int k : {2, 3, 5}) {
    for (double t : {10.0, 300.0, 1e5}) {
      const BoundInputs inp = BoundInputs::for_family(k, t);
      const LayerBounds lb = layer_bounds(inp);
      const double m = static_cast<double>(k);  // floor((2k + 1 - 1) / 2)
      const double mix = (m * lb.vertical + lb.horizontal) / (1.0 + m);
      const Certificate c = asymptotic_certificate(inp);
      CHECK(c.value == doctest::Approx(mix).epsilon(1e-12));
      CHECK(c.slope == doctest::Approx((m - 1) / (m + 1)));
    }
  }
  CHECK(certificate_slope(5) == doctest::Approx(1.0 / 3.0));
  CHECK(asymptotic_certificate(BoundInputs::for_family(2, 3.0)).value < 0.0);
}

TEST_CASE("threshold solver") {
  for (int k : {2, 3, 5}) {
    const BoundInputs inp = BoundInputs::for_family(k, 0.0);
    const ThresholdReport rep = solve_threshold(inp, Condition::nuh, std::nullopt, {1e4});
    BoundInputs at = inp;
    at.t = rep.minimal_t;
    CHECK(check_threshold(at, Condition::nuh, 0.0).satisfied);
    at.t = rep.minimal_t * (1 - 1e-4);
    CHECK_FALSE(check_threshold(at, Condition::nuh, 0.0).satisfied);
    // Without the 1/t corrections the certificate is larger, so the
    // leading-order threshold sits slightly lower.
    CHECK(rep.leading_order_t < rep.minimal_t);
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].satisfied);
    CHECK(rep.satisfied_at == std::vector<double>{1e4});
  }
  const double log25 = std::log(25.0);
  const ThresholdReport u1 =
      solve_threshold(BoundInputs::for_family(2, 0.0), Condition::u1, log25, {10.02});
  CHECK(u1.rhs == doctest::Approx(-0.5 * log25));
  CHECK(u1.minimal_t == doctest::Approx(10.0114).epsilon(1e-4));
  CHECK(u1.satisfied_at.size() == 1);
  CHECK_THROWS_AS(solve_threshold(BoundInputs::for_family(2, 0.0), Condition::u1, std::nullopt),
                  std::invalid_argument);
  CHECK(condition_from_string("U1") == Condition::u1);
  CHECK_THROWS_AS(condition_from_string("xyz"), std::invalid_argument);
}

TEST_CASE("certificate threshold regression values") {
  const ThresholdReport r2 = solve_threshold(BoundInputs::for_family(2, 0.0), Condition::nuh, {});
  CHECK(r2.minimal_t == doctest::Approx(1043.6965).epsilon(1e-6));
  CHECK(r2.leading_order_t == doctest::Approx(1041.95).epsilon(1e-5));
  const ThresholdReport r3 = solve_threshold(BoundInputs::for_family(3, 0.0), Condition::nuh, {});
  CHECK(r3.minimal_t == doctest::Approx(217.245).epsilon(1e-5));
}

TEST_CASE("segment threshold") {
  const BoundInputs inp = BoundInputs::for_family(2, 0.0);
  const double a = 2 * kPi * std::sin(kPi / 10);
  const double expect = (4 * 4 + 2 * 0.2) / (0.2 * a);
  CHECK(segment_threshold(inp) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(segment_threshold(inp) == doctest::Approx(42.233).epsilon(1e-4));
  BoundInputs bad = inp;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(segment_threshold(bad), MapError);
}

TEST_CASE("rescaled cocycle differs by log sqrt(d) per step") {
  const EndoMap f = EndoMap::standard_family(2, 1042.0);
  for (std::uint64_t k = 0; k < 100; ++k) {
    CounterRng rng(62, k);
    const auto c = compare_scaled_cocycle(f, random_point(rng), random_unit(rng), 100);
    CHECK(c.scale_log == doctest::Approx(0.5 * std::log(25.0)));
    CHECK(std::abs(c.log_norm_map - c.log_norm_scaled - 100 * c.scale_log) < 1e-9);
  }
}
