#include "nuh/segments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "nuh/errors.hpp"
#include "nuh/rng.hpp"

namespace nuh {
namespace {

double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(std::abs(a.x * b.y - a.y * b.x), a.x * b.x + a.y * b.y);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.x * d.x + d.y * d.y;
  double s = len2 > 0.0 ? ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return euclidean_norm(p - (a + d * s));
}

struct Refiner {
  const EndoMap& f;
  std::size_t branch;
  const PullbackOptions& opt;
  std::vector<Vec2>& out;

  void run(Vec2 a, Vec2 b, Vec2 fa, Vec2 fb, int depth) const {
    const Vec2 d = b - a;
    const Vec2 ta = f.lift_inverse_branch_derivative(a, branch) * d;
    const Vec2 tb = f.lift_inverse_branch_derivative(b, branch) * d;
    const Vec2 chord = fb - fa;
    const double spread = std::max({angle_between(ta, tb), angle_between(ta, chord),
                                    angle_between(chord, tb)});
    if (spread < opt.angle_tol || depth >= opt.max_depth) {
      if (out.size() >= opt.max_vertices) throw BudgetExceeded(out.size() + 1, opt.max_vertices);
      out.push_back(fb);
      return;
    }
    const Vec2 m = (a + b) * 0.5;
    const Vec2 fm = f.lift_inverse_branch(m, branch);
    run(a, m, fa, fm, depth + 1);
    run(m, b, fm, fb, depth + 1);
  }
};

// Sub-polyline of max-length `reach` (or up to the end) on each side of
// vertex idx, cutting the last edge on each side by interpolation.
std::pair<Polyline, std::size_t> window_around(const Polyline& p, std::size_t idx, double reach) {
  std::vector<Vec2> before, after;
  double acc = 0.0;
  for (std::size_t i = idx; i > 0 && acc < reach; --i) {
    const Vec2 e = p.vertices[i - 1] - p.vertices[i];
    const double m = max_norm(e);
    const double s = acc + m > reach ? (reach - acc) / m : 1.0;
    before.push_back(p.vertices[i] + e * s);
    acc += m;
  }
  acc = 0.0;
  for (std::size_t i = idx; i < p.edge_count() && acc < reach; ++i) {
    const Vec2 e = p.edge(i);
    const double m = max_norm(e);
    const double s = acc + m > reach ? (reach - acc) / m : 1.0;
    after.push_back(p.vertices[i] + e * s);
    acc += m;
  }
  Polyline w;
  w.vertices.assign(before.rbegin(), before.rend());
  w.vertices.push_back(p.vertices[idx]);
  w.vertices.insert(w.vertices.end(), after.begin(), after.end());
  return {std::move(w), before.size()};
}

constexpr double kShortCurveLength = 0.05;

Polyline short_random_curve(CounterRng& rng) {
  const Vec2 start{rng.uniform(), rng.uniform()};
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  const double kappa = 10.0 * (rng.uniform() - 0.5);
  constexpr int kPieces = 16;
  Polyline p;
  p.vertices.push_back(start);
  for (int i = 1; i <= kPieces; ++i) {
    // Exact arc (or straight line when kappa is tiny).
    const double s = kShortCurveLength * i / kPieces;
    Vec2 q;
    if (std::abs(kappa) < 1e-9) {
      q = start + Vec2{std::cos(theta), std::sin(theta)} * s;
    } else {
      q = start + Vec2{(std::sin(theta + kappa * s) - std::sin(theta)) / kappa,
                       (std::cos(theta) - std::cos(theta + kappa * s)) / kappa};
    }
    p.vertices.push_back(q);
  }
  return p;
}

Vec2 tangent_at(const Polyline& p, std::size_t idx) {
  if (idx == 0) return p.edge(0);
  if (idx + 1 >= p.vertices.size()) return p.edge(idx - 1);
  return normalized_max(p.edge(idx - 1)) + normalized_max(p.edge(idx));
}

}  // namespace

double Polyline::max_length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i) s += max_norm(edge(i));
  return s;
}

double Polyline::euclidean_length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i) s += euclidean_norm(edge(i));
  return s;
}

void Polyline::write_csv(std::ostream& os) const {
  os << "index,x,y,x_mod,y_mod\n";
  os.precision(17);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2 r = reduce_torus(vertices[i]);
    os << i << ',' << vertices[i].x << ',' << vertices[i].y << ',' << r.x << ',' << r.y << '\n';
  }
}

VSegmentSpec VSegmentSpec::for_map(const EndoMap& f) {
  return {f.alpha() / (5.0 * f.expansion().e_v), f.alpha()};
}

bool edge_is_vertical(Vec2 e, double alpha) {
  return std::abs(e.y) >= alpha * std::abs(e.x) - 1e-12 * max_norm(e);
}

bool is_v_segment(const Polyline& p, const VSegmentSpec& spec) {
  if (p.vertices.size() < 2) throw std::invalid_argument("polyline needs at least two vertices");
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    if (p.vertices[i] == p.vertices[i + 1]) {
      throw std::invalid_argument("polyline has repeated consecutive vertices");
    }
  }
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    if (!edge_is_vertical(p.edge(i), spec.alpha)) return false;
  }
  return std::abs(p.max_length() - spec.length) <= 1e-9;
}

Polyline pullback_curve(const EndoMap& f, const Polyline& p, std::size_t branch,
                        const PullbackOptions& opt) {
  if (branch < 1 || branch > f.degree()) throw std::out_of_range("branch symbol out of range");
  Polyline out;
  if (p.vertices.empty()) return out;
  Vec2 prev = f.lift_inverse_branch(p.vertices[0], branch);
  out.vertices.push_back(prev);
  Refiner r{f, branch, opt, out.vertices};
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    const Vec2 next = f.lift_inverse_branch(p.vertices[i + 1], branch);
    r.run(p.vertices[i], p.vertices[i + 1], prev, next, 0);
    prev = next;
  }
  return out;
}

std::optional<Polyline> find_v_subsegment(const Polyline& p, const VSegmentSpec& spec) {
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    const Vec2 e = p.edge(i);
    if (!edge_is_vertical(e, spec.alpha)) {
      start = i + 1;
      acc = 0.0;
      continue;
    }
    const double m = max_norm(e);
    if (acc + m >= spec.length) {
      Polyline out;
      out.vertices.assign(p.vertices.begin() + static_cast<std::ptrdiff_t>(start),
                          p.vertices.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      const double r = spec.length - acc;
      if (r > 0.0) out.vertices.push_back(p.vertices[i] + e * (r / m));
      if (out.vertices.size() < 2) return std::nullopt;
      return out;
    }
    acc += m;
  }
  return std::nullopt;
}

std::optional<std::pair<Polyline, std::size_t>> vertical_run_through(const Polyline& p,
                                                                     std::size_t index,
                                                                     double alpha) {
  if (index >= p.vertices.size()) throw std::out_of_range("vertex index out of range");
  std::size_t lo = index, hi = index;
  while (lo > 0 && edge_is_vertical(p.edge(lo - 1), alpha)) --lo;
  while (hi < p.edge_count() && edge_is_vertical(p.edge(hi), alpha)) ++hi;
  if (lo == hi) return std::nullopt;
  Polyline run;
  run.vertices.assign(p.vertices.begin() + static_cast<std::ptrdiff_t>(lo),
                      p.vertices.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return std::make_pair(std::move(run), index - lo);
}

Polyline straight_segment(Vec2 start, Vec2 dir, double length, std::size_t pieces) {
  if (pieces == 0) throw std::invalid_argument("need at least one piece");
  const Vec2 u = normalized_max(dir) * length;
  Polyline p;
  for (std::size_t i = 0; i <= pieces; ++i) {
    p.vertices.push_back(start + u * (static_cast<double>(i) / static_cast<double>(pieces)));
  }
  return p;
}

double vertex_distance_to(const Polyline& a, const Polyline& b) {
  double worst = 0.0;
  for (const Vec2& v : a.vertices) {
    double best = std::numeric_limits<double>::infinity();
    if (b.vertices.size() == 1) best = euclidean_norm(v - b.vertices[0]);
    for (std::size_t i = 0; i < b.edge_count(); ++i) {
      best = std::min(best, point_segment_distance(v, b.vertices[i], b.vertices[i + 1]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

SegmentPullbackResult random_segment_pullbacks(const EndoMap& f, std::size_t trials,
                                               std::uint64_t seed) {
  const VSegmentSpec spec = VSegmentSpec::for_map(f);
  SegmentPullbackResult out;
  out.trials = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng(seed, k);
    const Vec2 start{rng.uniform(), rng.uniform()};
    // Open vertical cone: |slope^{-1}| < 1 / alpha.
    const double s = (2.0 * rng.uniform() - 1.0) / spec.alpha * (1.0 - 1e-9);
    const Polyline seg = straight_segment(start, {s, 1.0}, spec.length, 64);
    std::size_t hits = 0;
    for (std::size_t i = 1; i <= f.degree(); ++i) {
      if (find_v_subsegment(pullback_curve(f, seg, i), spec)) ++hits;
    }
    out.branches_with_subsegment.push_back(hits);
    if (hits > 0) ++out.successes;
  }
  return out;
}

GuidedResult guided_backward_experiment(const EndoMap& f, std::size_t curves, int max_steps,
                                        std::uint64_t seed) {
  const VSegmentSpec spec = VSegmentSpec::for_map(f);
  GuidedResult out;
  out.curves = curves;
  for (std::size_t c = 0; c < curves; ++c) {
    CounterRng rng(seed, c);
    Polyline curve = short_random_curve(rng);
    std::size_t tracked = curve.vertices.size() / 2;
    int reached_at = -1;
    for (int step = 1; step <= max_steps && reached_at < 0; ++step) {
      const Vec2 q = curve.vertices[tracked];
      const Vec2 tangent = tangent_at(curve, tracked);
      // Prefer a good preimage well away from the critical strips whose
      // pulled-back tangent is vertical.
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i <= f.degree(); ++i) {
        const Vec2 z = reduce_torus(f.lift_inverse_branch(q, i));
        const Vec2 w = f.lift_inverse_branch_derivative(q, i) * tangent;
        double score = f.distance_to_critical(z);
        if (f.classify(z) != Region::critical && in_vertical_cone(w, f.alpha())) score += 1.0;
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      const Vec2 image = f.lift_inverse_branch(q, best);
      Polyline pulled = pullback_curve(f, curve, best);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < pulled.vertices.size(); ++i) {
        if (pulled.vertices[i] == image) {
          idx = i;
          break;
        }
      }
      if (find_v_subsegment(pulled, spec)) {
        reached_at = step;
        break;
      }
      if (auto run = vertical_run_through(pulled, idx, f.alpha())) {
        curve = std::move(run->first);
        tracked = run->second;
      } else {
        // No vertical run: keep a short piece, since non-vertical pieces are
        // stretched by up to |DF| per step.
        std::tie(curve, tracked) = window_around(pulled, idx, kShortCurveLength);
      }
    }
    out.steps.push_back(reached_at);
    if (reached_at >= 0) ++out.reached;
  }
  return out;
}

}  // namespace nuh
