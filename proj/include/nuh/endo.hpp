#pragma once

// The map family f_t = E o h_t on the two-torus, where
// h_t(x1, x2) = (x1, x2 + t s(x1)) is an area-preserving shear and E is an
// integer matrix in normal position.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuh/cones.hpp"
#include "nuh/intmat.hpp"
#include "nuh/linalg.hpp"

namespace nuh {

/// Coordinates within this distance of an integer are snapped to it when
/// reducing to [0, 1).
inline constexpr double kTorusSnap = 1e-12;

double reduce_circle(double u);
Vec2 reduce_torus(Vec2 p);
/// Distance on T^2 induced by the max norm.
double torus_distance(Vec2 p, Vec2 q);

/// s(u) = sum_k cos_coef[k] cos(2 pi k u) + sin_coef[k] sin(2 pi k u).
struct TrigPolynomial {
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;

  static TrigPolynomial sine() { return {{0.0}, {0.0, 1.0}}; }

  double value(double u) const;
  double derivative(double u) const;
  /// Upper bound on |s''| from the coefficients.
  double second_derivative_bound() const;
  bool is_sine() const;
};

/// Endpoints x1 < x2 < x3 < x4 < x1 + 1 of the critical intervals
/// I1 = [x1, x2] and I3 = [x3, x4]; I2 = (x2, x3), I4 = (x4, x1 + 1).
struct RegionGeometry {
  std::array<double, 4> endpoints{};

  double delta() const { return 0.5 * (endpoints[1] - endpoints[0]); }
  /// Canonical choice for odd tau2: {1/4 - d, 1/4 + d, 3/4 - d, 3/4 + d}.
  static RegionGeometry odd(double delta);
};

struct ShearProfile {
  TrigPolynomial s = TrigPolynomial::sine();
  double a = 0.0;  // lower bound of |s'| on the good intervals
  double b = 0.0;  // upper bound of |s'| everywhere
  RegionGeometry regions;

  /// s = sin(2 pi u), delta = 1/(4 tau2), a = 2 pi sin(2 pi delta), b = 2 pi.
  /// Only valid for odd tau2.
  static ShearProfile default_for(Int tau2);
};

enum class Region { critical, good_plus, good_minus };
const char* to_string(Region r);

/// EH is f = E o h_t, HE is f = h_t o E.
enum class Composition { EH, HE };
const char* to_string(Composition c);
Composition composition_from_string(const std::string& s);

struct MapSpec {
  IntMatrix2 linear{5, 5, 0, 5};
  double t = 0.0;
  ShearProfile profile;
  double alpha = 2.0;
  Composition order = Composition::EH;

  /// E_k = (2k+1) [[1, 1], [0, 1]] with the default profile and alpha = 2.
  static MapSpec standard_family(int k, double t);
};

class MapError : public std::invalid_argument {
 public:
  enum class Kind { precondition, invalid_profile, invalid_regions, uncertified_alpha };

  MapError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Result of the numerical check of the three derivative conditions on s.
struct ProfileCheck {
  bool sampled_ok = false;
  /// Smallest slack over all sampled constraints (negative means violated).
  double worst_slack = 0.0;
  /// Max possible drift of s' between grid points (|s''|max * h / 2).
  double grid_drift = 0.0;
  /// worst_slack > grid_drift: the conditions hold between grid points too.
  bool certified = false;
};

ProfileCheck check_profile(const ShearProfile& profile, std::size_t grid = 10'000);

/// Validates the interval geometry for the given tau2; throws MapError.
void check_regions(const RegionGeometry& regions, Int tau2);

enum class Preconditions { enforce, relaxed };

class EndoMap {
 public:
  /// With Preconditions::enforce, rejects tau2 < 5, homotheties, invalid
  /// region/profile data and uncertified alpha. Relaxed mode skips those
  /// checks (test-only linear maps).
  explicit EndoMap(const MapSpec& spec, Preconditions pre = Preconditions::enforce);

  static EndoMap standard_family(int k, double t) { return EndoMap(MapSpec::standard_family(k, t)); }

  /// f(x), reduced to [0, 1)^2.
  Vec2 evaluate(Vec2 x) const;
  Mat2 derivative(Vec2 x) const;
  Mat2 inverse_derivative(Vec2 x) const;

  /// The lift to the plane and its exact inverse.
  Vec2 lift_evaluate(Vec2 p) const;
  Vec2 lift_inverse(Vec2 p) const;
  /// F_i(p) = lift_inverse(p + w_i), symbol i in 1..d.
  Vec2 lift_inverse_branch(Vec2 p, std::size_t symbol) const;
  /// Derivative of F_i at p (independent of the translation).
  Mat2 lift_inverse_branch_derivative(Vec2 p, std::size_t symbol) const;

  /// The d preimages of x, in symbol order.
  std::vector<Vec2> preimages(Vec2 x) const;

  Region classify(Vec2 x) const;
  /// Distance from the first coordinate to the critical intervals.
  double distance_to_critical(Vec2 x) const;

  double shear(double u) const { return t_ * profile_.s.value(u); }
  double shear_derivative(double u) const { return t_ * profile_.s.derivative(u); }

  const IntMatrix2& linear() const { return g_; }
  const IntMatrix2& input_linear() const { return input_; }
  /// P with linear() = P^{-1} input_linear() P.
  const IntMatrix2& conjugator() const { return conj_; }
  const CosetIndex& cosets() const { return cosets_; }
  Int tau1() const { return cosets_.smith().tau1; }
  Int tau2() const { return cosets_.smith().tau2; }
  std::size_t degree() const { return cosets_.size(); }
  double t() const { return t_; }
  double alpha() const { return alpha_; }
  Composition order() const { return order_; }
  const ShearProfile& profile() const { return profile_; }
  const ExpansionConstants& expansion() const { return expansion_; }
  /// |det Df| is constant (= d) for every member of the family.
  bool has_constant_jacobian() const { return true; }
  MapSpec spec() const;

 private:
  Mat2 shear_jacobian(double u) const { return {1.0, 0.0, shear_derivative(u), 1.0}; }
  Mat2 shear_jacobian_inverse(double u) const { return {1.0, 0.0, -shear_derivative(u), 1.0}; }

  IntMatrix2 input_;
  IntMatrix2 conj_;
  IntMatrix2 g_;
  Mat2 g_real_;
  Mat2 g_inv_;
  CosetIndex cosets_;
  double t_;
  ShearProfile profile_;
  double alpha_;
  Composition order_;
  ExpansionConstants expansion_;
};

}  // namespace nuh
