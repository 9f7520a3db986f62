#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "nuh/cones.hpp"
#include "nuh/rng.hpp"

using namespace nuh;

namespace {

// Brute-force minimum of ||m v|| over max-norm unit v in the closed cone,
// walking the boundary of the unit square.
double sampled_min(const Mat2& m, const Cone& c, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double s = -1.0 + 2.0 * i / steps;
    for (Vec2 v : {Vec2{s, 1.0}, Vec2{1.0, s}}) {
      const bool inside = c.kind == ConeKind::horizontal
                              ? std::abs(v.y) <= c.alpha * std::abs(v.x)
                              : std::abs(v.y) >= c.alpha * std::abs(v.x);
      if (inside) best = std::min(best, max_norm(m * v));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("cone membership") {
  CHECK(contains({2.0, ConeKind::vertical}, {0.0, 1.0}));
  CHECK(contains({2.0, ConeKind::horizontal}, {1.0, 0.0}));
  // The boundary belongs to the closed horizontal cone.
  CHECK(contains({2.0, ConeKind::horizontal}, {1.0, 2.0}));
  CHECK_FALSE(contains({2.0, ConeKind::vertical}, {1.0, 2.0}));
  CHECK(classify_direction({1.0, -2.0}, 2.0) == ConeKind::horizontal);
  CHECK_THROWS_AS(contains({2.0, ConeKind::vertical}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("alpha certification for the sheared family") {
  const IntMatrix2 e{5, 5, 0, 5};
  CHECK(certify_alpha(e, 2.0));
  // E^{-1}(1, 2) = (-1, 2)/5 sits on the boundary of the horizontal cone.
  CHECK_FALSE(certify_alpha_strict(e, 2.0));
  CHECK(certify_alpha_strict(e, 2.5));
  // Sampled oracle over the open vertical cone.
  const Mat2 inv = e.real_inverse();
  for (int i = 1; i < 10000; ++i) {
    const double s = -0.5 + i / 10000.0;
    const Vec2 u = inv * Vec2{s, 1.0};
    REQUIRE(std::abs(u.y) <= 2.0 * std::abs(u.x));
  }
  CHECK_FALSE(certify_alpha(IntMatrix2::diagonal(5, 5), 2.0));
  CHECK_FALSE(certify_alpha(e, 1.5));
}

TEST_CASE("alpha search") {
  std::vector<double> grid;
  for (int i = 11; i <= 40; ++i) grid.push_back(i / 10.0);
  const auto a = search_alpha({5, 5, 0, 5}, grid);
  REQUIRE(a.has_value());
  CHECK(*a == doctest::Approx(2.0));
  CHECK_FALSE(search_alpha(IntMatrix2::diagonal(5, 5), grid).has_value());
}

TEST_CASE("minimal cone expansion matches a sampled oracle") {
  for (std::uint64_t k = 0; k < 300; ++k) {
    CounterRng rng(21, k);
    const Mat2 m{rng.uniform() * 4 - 2, rng.uniform() * 4 - 2, rng.uniform() * 4 - 2,
                 rng.uniform() * 4 - 2};
    const double alpha = 1.0 + 3.0 * rng.uniform();
    for (ConeKind kind : {ConeKind::vertical, ConeKind::horizontal}) {
      const Cone c{alpha, kind};
      const double exact = min_norm_on_cone(m, c);
      const double sampled = sampled_min(m, c, 200000);
      CHECK(exact <= sampled + 1e-12);
      CHECK(exact >= sampled - 1e-4);
    }
  }
}

TEST_CASE("expansion constants of E_k") {
  for (int k = 2; k <= 6; ++k) {
    const Int m = 2 * k + 1;
    const ExpansionConstants ec = expansion_constants({m, m, 0, m}, 2.0);
    // E^{-1}(s, 1) = (s - 1, 1)/m has norm >= 1/m; E^{-1}(1, s) = (1 - s, s)/m
    // is smallest at s = 1/2.
    CHECK(ec.e_v == doctest::Approx(1.0 / m).epsilon(1e-14));
    CHECK(ec.e_h == doctest::Approx(0.5 / m).epsilon(1e-14));
  }
}
