#pragma once

// Curves tangent to the vertical cone ("v-segments") and their pullbacks
// under the inverse branches.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "nuh/endo.hpp"

namespace nuh {

struct Polyline {
  std::vector<Vec2> vertices;

  std::size_t edge_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  Vec2 edge(std::size_t i) const { return vertices[i + 1] - vertices[i]; }
  /// Sum of max(|dx|, |dy|) over edges.
  double max_length() const;
  double euclidean_length() const;
  void write_csv(std::ostream& os) const;
};

struct VSegmentSpec {
  double length = 2.0;
  double alpha = 2.0;

  /// length = alpha / (5 e_v).
  static VSegmentSpec for_map(const EndoMap& f);
};

/// Edge in the closed vertical cone, with 1e-12 relative slack.
bool edge_is_vertical(Vec2 e, double alpha);

/// Throws std::invalid_argument for fewer than two or repeated vertices.
bool is_v_segment(const Polyline& p, const VSegmentSpec& spec);

struct PullbackOptions {
  double angle_tol = 1e-3;  // radians between adjacent tangent directions
  int max_depth = 40;
  /// Output vertex cap; exceeding it throws BudgetExceeded.
  std::size_t max_vertices = 1'000'000;
};

/// Image of p under the plane inverse branch F_branch, refined until the
/// tangent directions along each edge agree to angle_tol.
Polyline pullback_curve(const EndoMap& f, const Polyline& p, std::size_t branch,
                        const PullbackOptions& opt = {});

/// First maximal vertical run with max-length >= spec.length, trimmed to
/// exactly spec.length.
std::optional<Polyline> find_v_subsegment(const Polyline& p, const VSegmentSpec& spec);

/// Maximal vertical run containing vertex `index` (as a sub-polyline), with
/// the index of that vertex inside it.
std::optional<std::pair<Polyline, std::size_t>> vertical_run_through(const Polyline& p,
                                                                     std::size_t index,
                                                                     double alpha);

/// Straight segment from `start` along `dir` with max-length `length`.
Polyline straight_segment(Vec2 start, Vec2 dir, double length, std::size_t pieces = 1);

/// Directed Hausdorff-type distance: max over vertices of a of the distance
/// to the polyline b (Euclidean).
double vertex_distance_to(const Polyline& a, const Polyline& b);

struct SegmentPullbackResult {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::vector<std::size_t> branches_with_subsegment;  // per trial
};

/// Random v-segments through random points; counts those for which at
/// least one of the d pullbacks contains a v-segment.
SegmentPullbackResult random_segment_pullbacks(const EndoMap& f, std::size_t trials,
                                               std::uint64_t seed);

struct GuidedResult {
  std::size_t curves = 0;
  std::size_t reached = 0;
  std::vector<int> steps;  // per curve; -1 when not reached
};

/// Short random curves pulled back along branches whose preimage lies in
/// the good region with a vertical pullback, until a v-segment appears.
GuidedResult guided_backward_experiment(const EndoMap& f, std::size_t curves, int max_steps,
                                        std::uint64_t seed);

}  // namespace nuh
