#pragma once

// Exact preimage-tree averages of log pullback norms: I(x, v; f^n), the
// good/bad branch counts per layer and grid estimates of C_chi.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nuh/endo.hpp"
#include "nuh/errors.hpp"

namespace nuh {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kDefaultTreeBudget = 10'000'000;

/// A point of the unit tangent bundle; v is normalized in the max norm.
struct TangentSample {
  Vec2 x;
  Vec2 v;

  /// Normalizes v; throws std::invalid_argument for v = 0.
  static TangentSample make(Vec2 x, Vec2 v);
};

enum class WeightMode { constant_jacobian, general };

struct TreeOptions {
  std::uint64_t budget = kDefaultTreeBudget;
  WeightMode weights = WeightMode::constant_jacobian;
};

struct PreimageTreeStats {
  int depth = 0;
  /// Layers 0..depth: nodes whose pulled-back direction is vertical.
  std::vector<std::uint64_t> g;
  std::vector<std::uint64_t> b;
  std::vector<double> a;
  /// J[i], i < depth: weighted log-norm gained from layer i to i + 1.
  std::vector<double> J;
  /// Leaf sum of weighted log ||(D f^n)^{-1} v|| with explicit products.
  double I = 0.0;
  /// Sum of J; equals I up to rounding.
  double I_from_layers = 0.0;
  /// Range of the one-step averages I(y, w; f) over internal nodes.
  double node_min = 0.0;
  double node_max = 0.0;
  /// Per layer, the sum of the weights (should be 1).
  std::vector<double> weight_sums;
};

/// Enumerates all d^n branches. Throws BudgetExceeded when d^n > budget.
PreimageTreeStats pullback_tree(const EndoMap& f, const TangentSample& sample, int n,
                                const TreeOptions& opt = {});

/// c = (tau2 - 1 - m) / tau2 and e = m / tau2 with m = floor((tau2 - 1) / 2).
struct RecursionConstants {
  Rational c;
  Rational e;

  static RecursionConstants for_tau2(Int tau2);
};

/// m / (1 + m) * (1 - c^n), exact. Throws MapError for tau2 < 5.
Rational good_fraction_bound(Int tau2, int n);

struct GridSpec {
  int nx = 8;
  int ny = 8;
  int directions = 8;

  /// Midpoints of a uniform partition, angles (2j + 1) pi / (2 directions).
  std::vector<TangentSample> samples() const;
  /// Parses "8x8x8".
  static GridSpec parse(const std::string& text);
};

struct CChiEstimate {
  double value = 0.0;
  TangentSample argmin;
  int depth = 0;
  std::size_t samples = 0;
  double max_value = 0.0;
};

/// min over the grid of I(x, v; f^n) / n: an upper estimate of the infimum.
CChiEstimate estimate_c_chi(const EndoMap& f, const GridSpec& grid, int n,
                            const TreeOptions& opt = {});

/// log |det E|; exact for the constant-Jacobian family.
double c_det(const EndoMap& f);

/// Per-branch classification of the preimages of x: whether the inverse
/// derivative maps the vertical cone into itself, and at depth two the
/// half-cone split of the horizontal cone for the failing branches.
struct SecondLevelBranch {
  std::size_t symbol = 0;
  Vec2 point;
  bool blue_vertical = false;  // directions (1, s), 0 <= s <= 1
  bool red_vertical = false;   // the rest of the horizontal cone
};

struct FirstLevelBranch {
  std::size_t symbol = 0;
  Vec2 point;
  Region region = Region::critical;
  bool cone_invariant = false;
  std::vector<SecondLevelBranch> children;
  std::size_t blue_count = 0;
  std::size_t red_count = 0;
};

struct PreimageConeReport {
  Vec2 x;
  std::vector<FirstLevelBranch> branches;
  std::size_t invariant_count = 0;
};

PreimageConeReport preimage_cone_report(const EndoMap& f, Vec2 x, int depth);

}  // namespace nuh
