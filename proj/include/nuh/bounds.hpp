#pragma once

// Analytic lower bounds for the layer averages and the threshold in t above
// which they certify a positive C_chi (or the weaker U1 condition).

#include <optional>
#include <string>
#include <vector>

#include "nuh/endo.hpp"

namespace nuh {

struct BoundInputs {
  Int tau2 = 5;
  double alpha = 2.0;
  double a = 0.0;
  double b = 0.0;
  double e_v = 0.0;
  double e_h = 0.0;
  double t = 0.0;

  static BoundInputs for_map(const EndoMap& f);
  /// Constants of E_k = (2k+1)[[1,1],[0,1]] with the default profile.
  static BoundInputs for_family(int k, double t);
};

/// floor((tau2 - 1) / 2).
Int good_half_count(Int tau2);

struct LayerBounds {
  double vertical = 0.0;
  double horizontal = 0.0;
};

/// Lower bounds for I(x, v; f) with v in the vertical / horizontal cone.
/// Throws MapError for t <= 2 alpha / a.
LayerBounds layer_bounds(const BoundInputs& inp);

struct Certificate {
  double slope = 0.0;
  double constant = 0.0;  // C(t)
  double value = 0.0;     // slope log t + C(t)
};

/// (m - 1) / (m + 1) with m = floor((tau2 - 1) / 2).
double certificate_slope(Int tau2);
Certificate asymptotic_certificate(const BoundInputs& inp);

enum class Condition { nuh, u1 };
const char* to_string(Condition c);
Condition condition_from_string(const std::string& s);

struct ThresholdCheck {
  double t = 0.0;
  double lhs = 0.0;  // slope log t + C(t)
  double rhs = 0.0;  // 0 (NUH) or -C_det / 2 (U1)
  bool satisfied = false;
};

struct ThresholdReport {
  Condition condition = Condition::nuh;
  Int tau2 = 5;
  double slope = 0.0;
  double rhs = 0.0;
  /// Certificate threshold: the smallest t with lhs > rhs, to 1e-6.
  double minimal_t = 0.0;
  double constant_at_minimal = 0.0;
  /// Same threshold with the 1/t corrections in C(t) dropped.
  double leading_order_t = 0.0;
  std::vector<ThresholdCheck> checks;
  std::vector<double> satisfied_at;
};

ThresholdCheck check_threshold(const BoundInputs& inp, Condition cond, double c_det);

/// Bisection on [2 alpha / a (1 + 1e-9), 1e9]; `inp.t` is ignored. For U1,
/// c_det must be supplied. Throws NumericalFailure when the bracket has no
/// sign change.
ThresholdReport solve_threshold(const BoundInputs& inp, Condition cond,
                                std::optional<double> c_det,
                                const std::vector<double>& check_ts = {});

/// max(2 alpha / a, (4 alpha^2 + alpha e_v) / (e_v a)). Throws for alpha <= 1.
double segment_threshold(const BoundInputs& inp);

/// Forward cocycle of f against the rescaled cocycle Df / sqrt(d) along the
/// same orbit; for E_k the rescaled one is the standard-map cocycle.
struct CocycleComparison {
  double log_norm_map = 0.0;
  double log_norm_scaled = 0.0;
  double scale_log = 0.0;  // log sqrt(d)
};

CocycleComparison compare_scaled_cocycle(const EndoMap& f, Vec2 x, Vec2 v, int n);

}  // namespace nuh
