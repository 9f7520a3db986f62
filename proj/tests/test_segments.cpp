#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lemma_suites.hpp"
#include "nuh/errors.hpp"
#include "nuh/segments.hpp"

using namespace nuh;
using nuh::testing::random_point;

namespace {

bool collinear(const Polyline& p, double tol) {
  const Vec2 d = p.vertices.back() - p.vertices.front();
  for (const Vec2& q : p.vertices) {
    const Vec2 r = q - p.vertices.front();
    if (std::abs(r.x * d.y - r.y * d.x) > tol * euclidean_norm(d)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("polyline lengths") {
  Polyline p{{{0, 0}, {1, 2}, {1, 5}}};
  CHECK(p.edge_count() == 2);
  CHECK(p.max_length() == doctest::Approx(5.0));
  CHECK(p.euclidean_length() == doctest::Approx(std::sqrt(5.0) + 3.0));
  std::ostringstream os;
  p.write_csv(os);
  CHECK(os.str().find("1,5") != std::string::npos);
}

TEST_CASE("v-segment predicate") {
  const VSegmentSpec spec{2.0, 2.0};
  CHECK(is_v_segment(straight_segment({0.1, 0.1}, {0.0, 1.0}, 2.0), spec));
  CHECK(is_v_segment(straight_segment({0.1, 0.1}, {0.4, 1.0}, 2.0, 5), spec));
  // Slope exactly alpha belongs to the closed cone.
  CHECK(edge_is_vertical({1.0, 2.0}, 2.0));
  CHECK_FALSE(edge_is_vertical({1.0, 1.9}, 2.0));
  CHECK_FALSE(is_v_segment(straight_segment({0, 0}, {1.0, 1.0}, 2.0), spec));
  CHECK_FALSE(is_v_segment(straight_segment({0, 0}, {0.0, 1.0}, 1.5), spec));
  CHECK_THROWS_AS(is_v_segment(Polyline{{{0, 0}}}, spec), std::invalid_argument);
  CHECK_THROWS_AS(is_v_segment(Polyline{{{0, 0}, {0, 0}, {0, 2}}}, spec), std::invalid_argument);

  const EndoMap f = EndoMap::standard_family(2, 50.0);
  const VSegmentSpec fs = VSegmentSpec::for_map(f);
  CHECK(fs.length == doctest::Approx(2.0));  // alpha / (5 e_v) with e_v = 1/5
  CHECK(fs.alpha == 2.0);
}

TEST_CASE("max-length and Euclidean length of v-segments are comparable") {
  const double alpha = 2.0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    CounterRng rng(81, k);
    Polyline p{{random_point(rng)}};
    for (int i = 0; i < 10; ++i) {
      const double s = (2.0 * rng.uniform() - 1.0) / alpha;
      const double h = 0.05 + rng.uniform();
      p.vertices.push_back(p.vertices.back() + Vec2{s * h, (rng.uniform() < 0.5 ? -1 : 1) * h});
    }
    CHECK(p.max_length() <= p.euclidean_length() + 1e-12);
    CHECK(p.euclidean_length() <= std::sqrt(2.0) * p.max_length() + 1e-12);
  }
}

TEST_CASE("pullbacks map back onto the curve") {
  const EndoMap f = EndoMap::standard_family(2, 50.0);
  for (std::uint64_t k = 0; k < 20; ++k) {
    CounterRng rng(82, k);
    const Polyline seg = straight_segment(random_point(rng), {0.3, 1.0}, 2.0, 16);
    const std::size_t branch = 1 + rng.below(25);
    const Polyline back = pullback_curve(f, seg, branch);
    REQUIRE(back.vertices.size() >= seg.vertices.size());
    // The lift of F_i(p) is p + w_i.
    const Vec2 w = f.cosets().representative(branch - 1).to_real();
    Polyline image;
    for (const Vec2& q : back.vertices) image.vertices.push_back(f.lift_evaluate(q) - w);
    CHECK(vertex_distance_to(image, seg) < 1e-6);
    CHECK(max_norm(back.vertices.front() - f.lift_inverse_branch(seg.vertices.front(), branch)) < 1e-12);
    CHECK(max_norm(back.vertices.back() - f.lift_inverse_branch(seg.vertices.back(), branch)) < 1e-12);
    // Vertical tangents are expanded by at least e_v / alpha.
    CHECK(back.max_length() >= f.expansion().e_v / f.alpha() * seg.max_length() * (1 - 1e-9));
  }
  CHECK_THROWS_AS(pullback_curve(f, straight_segment({0, 0}, {0, 1}, 1.0), 0), std::out_of_range);
}

TEST_CASE("linear pullbacks stay straight") {
  const EndoMap f = EndoMap::standard_family(2, 0.0);
  const Polyline seg = straight_segment({0.2, 0.3}, {0.1, 1.0}, 2.0, 4);
  const Polyline back = pullback_curve(f, seg, 7);
  CHECK(back.vertices.size() == seg.vertices.size());
  CHECK(collinear(back, 1e-12));
  // E^{-1} (0.2, 2) = (-0.36, 0.4).
  CHECK(back.max_length() == doctest::Approx(0.4));
}

TEST_CASE("v-subsegment extraction") {
  const VSegmentSpec spec{2.0, 2.0};
  Polyline p{{{0, 0}, {1, 0}, {1, 1.5}, {1.2, 3.0}, {3, 3}}};
  const auto sub = find_v_subsegment(p, spec);
  REQUIRE(sub.has_value());
  CHECK(sub->vertices.front() == Vec2{1, 0});
  CHECK(sub->max_length() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(is_v_segment(*sub, spec));
  CHECK_FALSE(find_v_subsegment(Polyline{{{0, 0}, {1, 0}, {1, 1}}}, spec).has_value());

  const auto run = vertical_run_through(p, 2, 2.0);
  REQUIRE(run.has_value());
  CHECK(run->first.vertices.size() == 3);
  CHECK(run->second == 1);
  CHECK_FALSE(vertical_run_through(p, 0, 2.0).has_value());
}

TEST_CASE("distance between polylines") {
  const Polyline a{{{0, 1}, {1, 1}}};
  const Polyline b{{{0, 0}, {2, 0}}};
  CHECK(vertex_distance_to(a, b) == doctest::Approx(1.0));
  CHECK(vertex_distance_to(Polyline{{{3, 0}}}, b) == doctest::Approx(1.0));
}

TEST_CASE("segment experiments above the segment threshold") {
  const EndoMap f = EndoMap::standard_family(2, 50.0);
  const SegmentPullbackResult r = random_segment_pullbacks(f, 10, 5);
  CHECK(r.trials == 10);
  CHECK(r.successes == 10);
  CHECK(r.branches_with_subsegment.size() == 10);
  const GuidedResult g = guided_backward_experiment(f, 5, 10, 6);
  CHECK(g.curves == 5);
  CHECK(g.reached == 5);
  for (int s : g.steps) CHECK(s >= 1);
}

TEST_CASE("opposite composition order stays bounded") {
  // With f = h o E the inverse applies E^{-1} last, which sends vertical
  // tangents into the horizontal cone; the experiments must still finish.
  MapSpec spec = MapSpec::standard_family(2, 50.0);
  spec.order = Composition::HE;
  const EndoMap f(spec);
  const GuidedResult g = guided_backward_experiment(f, 5, 50, 6);
  CHECK(g.steps.size() == 5);
  const SegmentPullbackResult r = random_segment_pullbacks(f, 5, 5);
  CHECK(r.trials == 5);
  PullbackOptions tight;
  tight.max_vertices = 10;
  CHECK_THROWS_AS(pullback_curve(f, straight_segment({0.3, 0.3}, {0, 1}, 2.0, 64), 1, tight),
                  BudgetExceeded);
}
