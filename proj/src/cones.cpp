#include "nuh/cones.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace nuh {
namespace {

// Chart coordinate on the projective line: slope y/x for the horizontal
// cone, inverse slope x/y for the vertical one.
double chart(Vec2 u, ConeKind kind) { return kind == ConeKind::horizontal ? u.y / u.x : u.x / u.y; }

bool in_closure(Vec2 u, const Cone& c) {
  return c.kind == ConeKind::horizontal ? in_horizontal_cone(u, c.alpha)
                                        : std::abs(u.y) >= c.alpha * std::abs(u.x);
}

bool in_cone(Vec2 u, const Cone& c) {
  return c.kind == ConeKind::horizontal ? in_horizontal_cone(u, c.alpha)
                                        : in_vertical_cone(u, c.alpha);
}

bool between(double v, double a, double b) { return std::min(a, b) <= v && v <= std::max(a, b); }

struct Piece {
  Vec2 base;  // v(s) = base + s * dir
  Vec2 dir;
  double lo;
  double hi;
};

// Minimum over s in [lo, hi] of max(|A s + B|, |C s + D|).
double min_piecewise_linear(const Mat2& m, const Piece& p) {
  const Vec2 b = m * p.base;
  const Vec2 a = m * p.dir;
  std::vector<double> cand{p.lo, p.hi};
  if (a.x != 0.0) cand.push_back(-b.x / a.x);
  if (a.y != 0.0) cand.push_back(-b.y / a.y);
  if (a.x - a.y != 0.0) cand.push_back((b.y - b.x) / (a.x - a.y));
  if (a.x + a.y != 0.0) cand.push_back(-(b.x + b.y) / (a.x + a.y));
  double best = std::numeric_limits<double>::infinity();
  for (double s : cand) {
    if (s < p.lo || s > p.hi) continue;
    best = std::min(best, max_norm(b + a * s));
  }
  return best;
}

}  // namespace

const char* to_string(ConeKind kind) {
  return kind == ConeKind::vertical ? "vertical" : "horizontal";
}

bool contains(const Cone& cone, Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) throw std::invalid_argument("zero vector has no direction");
  return in_cone(v, cone);
}

ConeKind classify_direction(Vec2 v, double alpha) {
  if (v.x == 0.0 && v.y == 0.0) throw std::invalid_argument("zero vector has no direction");
  return in_horizontal_cone(v, alpha) ? ConeKind::horizontal : ConeKind::vertical;
}

DirectionArc vertical_arc(double alpha) { return {{1.0, alpha}, {-1.0, alpha}, {0.0, 1.0}}; }

bool arc_maps_into(const Mat2& m, const DirectionArc& arc, const Cone& target,
                   bool open_endpoints) {
  const Vec2 p1 = m * arc.first;
  const Vec2 p2 = m * arc.last;
  const Vec2 p3 = m * arc.interior;
  auto endpoint_ok = [&](Vec2 u) {
    return open_endpoints ? in_closure(u, target) : in_cone(u, target);
  };
  if (!endpoint_ok(p1) || !endpoint_ok(p2) || !in_cone(p3, target)) return false;
  return between(chart(p3, target.kind), chart(p1, target.kind), chart(p2, target.kind));
}

bool certify_alpha(const IntMatrix2& e, double alpha) {
  return arc_maps_into(e.real_inverse(), vertical_arc(alpha), {alpha, ConeKind::horizontal},
                       /*open_endpoints=*/true);
}

bool certify_alpha_strict(const IntMatrix2& e, double alpha) {
  const Mat2 inv = e.real_inverse();
  const DirectionArc arc = vertical_arc(alpha);
  const Vec2 p[3] = {inv * arc.first, inv * arc.last, inv * arc.interior};
  for (const Vec2& u : p) {
    if (!(std::abs(u.y) < alpha * std::abs(u.x))) return false;
  }
  return between(p[2].y / p[2].x, p[0].y / p[0].x, p[1].y / p[1].x);
}

std::optional<double> search_alpha(const IntMatrix2& e, std::span<const double> grid) {
  for (double alpha : grid) {
    if (alpha > 1.0 && certify_alpha(e, alpha)) return alpha;
  }
  return std::nullopt;
}

double min_norm_on_cone(const Mat2& m, const Cone& cone) {
  // Max-norm unit vectors up to sign: top edge (s, 1) and right edge (1, s),
  // s in [-1, 1]. Intersect each edge with the closed cone.
  const double a = cone.alpha;
  std::vector<Piece> pieces;
  const Vec2 top{0.0, 1.0}, right{1.0, 0.0};
  const Vec2 along_x{1.0, 0.0}, along_y{0.0, 1.0};
  if (cone.kind == ConeKind::vertical) {
    const double r = std::min(1.0, 1.0 / a);
    pieces.push_back({top, along_x, -r, r});
    if (a <= 1.0) {
      pieces.push_back({right, along_y, a, 1.0});
      pieces.push_back({right, along_y, -1.0, -a});
    }
  } else {
    const double r = std::min(1.0, a);
    pieces.push_back({right, along_y, -r, r});
    if (a >= 1.0) {
      pieces.push_back({top, along_x, 1.0 / a, 1.0});
      pieces.push_back({top, along_x, -1.0, -1.0 / a});
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces) best = std::min(best, min_piecewise_linear(m, p));
  return best;
}

double min_expansion(const IntMatrix2& e, const Cone& cone) {
  return min_norm_on_cone(e.real_inverse(), cone);
}

ExpansionConstants expansion_constants(const IntMatrix2& e, double alpha) {
  return {min_expansion(e, {alpha, ConeKind::vertical}),
          min_expansion(e, {alpha, ConeKind::horizontal})};
}

}  // namespace nuh
