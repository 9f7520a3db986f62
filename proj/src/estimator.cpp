#include "nuh/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nuh/parallel.hpp"

namespace nuh {
namespace {

struct SubtreeAccumulator {
  std::vector<std::uint64_t> g;
  std::vector<double> layer_sum;   // weighted log-norm increments, per layer
  std::vector<double> weight_sum;  // per layer
  double leaf_sum = 0.0;
  double node_min = std::numeric_limits<double>::infinity();
  double node_max = -std::numeric_limits<double>::infinity();
};

struct Walker {
  const EndoMap& f;
  int depth;
  WeightMode mode;
  double inv_degree;
  double alpha;

  // Visits the node (y, w) at `level`: w is the unit pulled-back direction,
  // product the explicit (D_y f^level)^{-1}, weight its determinant weight.
  void visit(Vec2 y, Vec2 w, const Mat2& product, double weight, int level,
             SubtreeAccumulator& acc) const {
    if (in_vertical_cone(w, alpha)) ++acc.g[level];
    acc.weight_sum[level] += weight;
    if (level == depth) {
      acc.leaf_sum += weight * std::log(max_norm(product * w_root));
      return;
    }
    double node_total = 0.0;
    for (const Vec2& z : f.preimages(y)) {
      const Mat2 inv = f.inverse_derivative(z);
      const Vec2 pulled = inv * w;
      const double gain = std::log(max_norm(pulled));
      const double child_weight = mode == WeightMode::constant_jacobian
                                      ? weight * inv_degree
                                      : weight * std::abs(inv.det());
      acc.layer_sum[level] += child_weight * gain;
      node_total += gain;
      visit(z, normalized_max(pulled), inv * product, child_weight, level + 1, acc);
    }
    const double node_avg = node_total * inv_degree;
    acc.node_min = std::min(acc.node_min, node_avg);
    acc.node_max = std::max(acc.node_max, node_avg);
  }

  Vec2 w_root;
};

std::uint64_t checked_power(std::uint64_t d, int n, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > budget / d) {
      // Report a saturated request rather than overflowing.
      long double req = std::pow(static_cast<long double>(d), n);
      throw BudgetExceeded(req > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(req), budget);
    }
    total *= d;
  }
  return total;
}

}  // namespace

TangentSample TangentSample::make(Vec2 x, Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) throw std::invalid_argument("tangent vector must be nonzero");
  return {x, normalized_max(v)};
}

PreimageTreeStats pullback_tree(const EndoMap& f, const TangentSample& sample, int n,
                                const TreeOptions& opt) {
  if (n < 0) throw std::invalid_argument("depth must be non-negative");
  const std::uint64_t d = f.degree();
  checked_power(d, n, opt.budget);

  Walker walker{f, n, opt.weights, 1.0 / static_cast<double>(d), f.alpha(), sample.v};
  auto fresh = [&] {
    SubtreeAccumulator acc;
    acc.g.assign(n + 1, 0);
    acc.layer_sum.assign(n + 1, 0.0);
    acc.weight_sum.assign(n + 1, 0.0);
    return acc;
  };

  PreimageTreeStats out;
  out.depth = n;
  std::vector<SubtreeAccumulator> parts;
  SubtreeAccumulator root = fresh();
  if (in_vertical_cone(sample.v, f.alpha())) root.g[0] = 1;
  root.weight_sum[0] = 1.0;

  if (n == 0) {
    root.leaf_sum = 0.0;
    root.node_min = root.node_max = 0.0;
    parts.push_back(root);
  } else {
    // Split at the first layer; each subtree is folded independently.
    const std::vector<Vec2> first = f.preimages(sample.x);
    parts = parallel_map<SubtreeAccumulator>(first.size(), [&](std::size_t i) {
      SubtreeAccumulator acc = fresh();
      const Vec2 z = first[i];
      const Mat2 inv = f.inverse_derivative(z);
      const Vec2 pulled = inv * sample.v;
      const double weight = opt.weights == WeightMode::constant_jacobian
                                ? walker.inv_degree
                                : std::abs(inv.det());
      acc.layer_sum[0] = weight * std::log(max_norm(pulled));
      walker.visit(z, normalized_max(pulled), inv, weight, 1, acc);
      return acc;
    });
    double total = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
      total += std::log(max_norm(f.inverse_derivative(first[i]) * sample.v));
    }
    root.node_min = root.node_max = total * walker.inv_degree;
    parts.insert(parts.begin(), root);
  }

  out.g.assign(n + 1, 0);
  out.J.assign(n, 0.0);
  out.weight_sums.assign(n + 1, 0.0);
  out.node_min = std::numeric_limits<double>::infinity();
  out.node_max = -std::numeric_limits<double>::infinity();
  std::vector<double> leaves;
  std::vector<std::vector<double>> layers(n + 1), weights(n + 1);
  for (const auto& p : parts) {
    for (int i = 0; i <= n; ++i) {
      out.g[i] += p.g[i];
      layers[i].push_back(p.layer_sum[i]);
      weights[i].push_back(p.weight_sum[i]);
    }
    leaves.push_back(p.leaf_sum);
    out.node_min = std::min(out.node_min, p.node_min);
    out.node_max = std::max(out.node_max, p.node_max);
  }
  std::uint64_t layer_size = 1;
  for (int i = 0; i <= n; ++i) {
    out.b.push_back(layer_size - out.g[i]);
    out.a.push_back(static_cast<double>(out.g[i]) / static_cast<double>(layer_size));
    out.weight_sums[i] = pairwise_sum(weights[i]);
    if (i < n) out.J[i] = pairwise_sum(layers[i]);
    layer_size *= d;
  }
  out.I = pairwise_sum(leaves);
  out.I_from_layers = pairwise_sum(out.J);
  return out;
}

RecursionConstants RecursionConstants::for_tau2(Int tau2) {
  if (tau2 < 5) {
    throw MapError(MapError::Kind::precondition, "good-fraction recursion requires tau2 >= 5");
  }
  const Int m = (tau2 - 1) / 2;
  return {Rational(tau2 - 1 - m, tau2), Rational(m, tau2)};
}

Rational good_fraction_bound(Int tau2, int n) {
  if (n < 0) throw std::invalid_argument("depth must be non-negative");
  const RecursionConstants rc = RecursionConstants::for_tau2(tau2);
  const Int m = (tau2 - 1) / 2;
  Rational cn = 1;
  for (int i = 0; i < n; ++i) cn *= rc.c;
  return Rational(m, 1 + m) * (1 - cn);
}

std::vector<TangentSample> GridSpec::samples() const {
  if (nx <= 0 || ny <= 0 || directions <= 0) throw std::invalid_argument("grid sizes must be positive");
  std::vector<TangentSample> out;
  out.reserve(static_cast<std::size_t>(nx) * ny * directions);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Vec2 x{(i + 0.5) / nx, (j + 0.5) / ny};
      for (int k = 0; k < directions; ++k) {
        const double th = (2.0 * k + 1.0) * std::numbers::pi / (2.0 * directions);
        out.push_back(TangentSample::make(x, {std::cos(th), std::sin(th)}));
      }
    }
  }
  return out;
}

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> g.nx >> x1 >> g.ny >> x2 >> g.directions) || x1 != 'x' || x2 != 'x' ||
      !in.eof() || g.nx <= 0 || g.ny <= 0 || g.directions <= 0) {
    throw std::invalid_argument("grid must look like NXxNYxNDIR, e.g. 8x8x8");
  }
  return g;
}

CChiEstimate estimate_c_chi(const EndoMap& f, const GridSpec& grid, int n,
                            const TreeOptions& opt) {
  if (n < 1) throw std::invalid_argument("depth must be at least 1");
  const std::vector<TangentSample> samples = grid.samples();
  CChiEstimate out;
  out.depth = n;
  out.samples = samples.size();
  out.value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  for (const TangentSample& s : samples) {
    const double v = pullback_tree(f, s, n, opt).I / n;
    if (v < out.value) {
      out.value = v;
      out.argmin = s;
    }
    out.max_value = std::max(out.max_value, v);
  }
  return out;
}

double c_det(const EndoMap& f) { return std::log(static_cast<double>(f.degree())); }

PreimageConeReport preimage_cone_report(const EndoMap& f, Vec2 x, int depth) {
  if (depth < 1 || depth > 2) throw std::invalid_argument("cone report depth must be 1 or 2");
  const double al = f.alpha();
  const Cone vertical{al, ConeKind::vertical};
  const DirectionArc blue{{1.0, 0.0}, {1.0, 1.0}, {1.0, 0.5}};
  // The remaining horizontal directions form two arcs.
  const DirectionArc red_upper{{1.0, 1.0}, {1.0, al}, {1.0, 0.5 * (1.0 + al)}};
  const DirectionArc red_lower{{1.0, -al}, {1.0, 0.0}, {1.0, -0.5 * al}};

  PreimageConeReport out;
  out.x = reduce_torus(x);
  const std::vector<Vec2> ys = f.preimages(out.x);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    FirstLevelBranch br;
    br.symbol = i + 1;
    br.point = ys[i];
    br.region = f.classify(ys[i]);
    br.cone_invariant = arc_maps_into(f.inverse_derivative(ys[i]), vertical_arc(al), vertical);
    if (br.cone_invariant) ++out.invariant_count;
    if (depth == 2 && !br.cone_invariant) {
      const std::vector<Vec2> zs = f.preimages(ys[i]);
      for (std::size_t j = 0; j < zs.size(); ++j) {
        const Mat2 inv = f.inverse_derivative(zs[j]);
        SecondLevelBranch c;
        c.symbol = j + 1;
        c.point = zs[j];
        c.blue_vertical = arc_maps_into(inv, blue, vertical);
        c.red_vertical =
            arc_maps_into(inv, red_upper, vertical) && arc_maps_into(inv, red_lower, vertical);
        br.blue_count += c.blue_vertical;
        br.red_count += c.red_vertical;
        br.children.push_back(c);
      }
    }
    out.branches.push_back(std::move(br));
  }
  return out;
}

}  // namespace nuh
