#include "nuh/endo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nuh {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Closed cyclic interval [lo, hi] on the circle (hi - lo < 1).
bool in_closed_arc(double u, double lo, double hi) {
  return reduce_circle(u - lo) <= (hi - lo) + 1e-15;
}

double arc_distance(double u, double lo, double hi) {
  if (in_closed_arc(u, lo, hi)) return 0.0;
  const double d1 = reduce_circle(lo - u);
  const double d2 = reduce_circle(u - hi);
  return std::min(d1, d2);
}

// The conjugator that puts the input into normal position; identity when it
// already is.
IntMatrix2 choose_conjugator(const IntMatrix2& input, Preconditions pre) {
  validate_linear_part(input);
  const SmithDecomposition snf = smith_normal_form(input);
  if (pre == Preconditions::enforce) {
    if (input.is_homothety()) {
      throw MapError(MapError::Kind::precondition,
                     "linear part is a homothety (excluded by the construction)");
    }
    if (snf.tau2 < 5) {
      std::ostringstream os;
      os << "tau2 = " << snf.tau2 << " < 5 (construction requires tau2 >= 5)";
      throw MapError(MapError::Kind::precondition, os.str());
    }
  }
  const bool lattice_ok = has_normal_lattice(input, snf.tau1, snf.tau2);
  if (lattice_ok && (input.is_homothety() || !fixes_vertical(input))) {
    return IntMatrix2::identity();
  }
  if (input.is_homothety()) {
    // Homotheties are diagonal with tau1 == tau2, so the lattice is fine;
    // unreachable, kept for completeness.
    return IntMatrix2::identity();
  }
  return normalize_position(input).conjugator;
}

}  // namespace

double reduce_circle(double u) {
  double r = u - std::floor(u);
  if (r >= 1.0 - kTorusSnap || r < kTorusSnap) r = 0.0;
  return r;
}

Vec2 reduce_torus(Vec2 p) { return {reduce_circle(p.x), reduce_circle(p.y)}; }

double torus_distance(Vec2 p, Vec2 q) {
  auto circ = [](double a, double b) {
    const double d = reduce_circle(a - b);
    return std::min(d, 1.0 - d);
  };
  return std::max(circ(p.x, q.x), circ(p.y, q.y));
}

double TrigPolynomial::value(double u) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos_coef.size(); ++k) s += cos_coef[k] * std::cos(kTwoPi * k * u);
  for (std::size_t k = 1; k < sin_coef.size(); ++k) s += sin_coef[k] * std::sin(kTwoPi * k * u);
  return s;
}

double TrigPolynomial::derivative(double u) const {
  double s = 0.0;
  for (std::size_t k = 1; k < cos_coef.size(); ++k) {
    s -= kTwoPi * k * cos_coef[k] * std::sin(kTwoPi * k * u);
  }
  for (std::size_t k = 1; k < sin_coef.size(); ++k) {
    s += kTwoPi * k * sin_coef[k] * std::cos(kTwoPi * k * u);
  }
  return s;
}

double TrigPolynomial::second_derivative_bound() const {
  double m = 0.0;
  const std::size_t n = std::max(cos_coef.size(), sin_coef.size());
  for (std::size_t k = 1; k < n; ++k) {
    const double ck = k < cos_coef.size() ? cos_coef[k] : 0.0;
    const double sk = k < sin_coef.size() ? sin_coef[k] : 0.0;
    m += (kTwoPi * k) * (kTwoPi * k) * std::hypot(ck, sk);
  }
  return m;
}

bool TrigPolynomial::is_sine() const {
  for (std::size_t k = 0; k < cos_coef.size(); ++k) {
    if (cos_coef[k] != 0.0) return false;
  }
  for (std::size_t k = 0; k < sin_coef.size(); ++k) {
    if (sin_coef[k] != (k == 1 ? 1.0 : 0.0)) return false;
  }
  return sin_coef.size() >= 2;
}

RegionGeometry RegionGeometry::odd(double delta) {
  return {{0.25 - delta, 0.25 + delta, 0.75 - delta, 0.75 + delta}};
}

ShearProfile ShearProfile::default_for(Int tau2) {
  if (tau2 % 2 == 0) {
    throw MapError(MapError::Kind::invalid_profile,
                   "no default shear profile for even tau2; supply one explicitly");
  }
  const double delta = 1.0 / (4.0 * static_cast<double>(tau2));
  ShearProfile p;
  p.s = TrigPolynomial::sine();
  p.a = kTwoPi * std::sin(kTwoPi * delta);
  p.b = kTwoPi;
  p.regions = RegionGeometry::odd(delta);
  return p;
}

const char* to_string(Region r) {
  switch (r) {
    case Region::critical: return "critical";
    case Region::good_plus: return "good_plus";
    case Region::good_minus: return "good_minus";
  }
  return "unknown";
}

const char* to_string(Composition c) { return c == Composition::EH ? "EH" : "HE"; }

Composition composition_from_string(const std::string& s) {
  if (s == "EH") return Composition::EH;
  if (s == "HE") return Composition::HE;
  throw std::invalid_argument("composition order must be EH or HE, got '" + s + "'");
}

MapSpec MapSpec::standard_family(int k, double t) {
  if (k < 1) throw MapError(MapError::Kind::precondition, "family index k must be >= 1");
  const Int m = 2 * k + 1;
  MapSpec spec;
  spec.linear = {m, m, 0, m};
  spec.t = t;
  spec.profile = ShearProfile::default_for(m);
  spec.alpha = 2.0;
  spec.order = Composition::EH;
  return spec;
}

ProfileCheck check_profile(const ShearProfile& profile, std::size_t grid) {
  const auto& x = profile.regions.endpoints;
  ProfileCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  const double h = 1.0 / static_cast<double>(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * h;
    const double d = profile.s.derivative(u);
    double slack = profile.b - std::abs(d);
    const bool in_i1 = in_closed_arc(u, x[0], x[1]);
    const bool in_i3 = in_closed_arc(u, x[2], x[3]);
    if (!in_i1 && !in_i3) {
      const bool in_i2 = in_closed_arc(u, x[1], x[2]);
      slack = std::min(slack, in_i2 ? (-profile.a - d) : (d - profile.a));
    }
    out.worst_slack = std::min(out.worst_slack, slack);
  }
  out.grid_drift = profile.s.second_derivative_bound() * h / 2.0;
  const double tol = 1e-9 * std::max(1.0, profile.b);
  out.sampled_ok = out.worst_slack >= -tol && profile.a > 0.0 && profile.a < profile.b;
  out.certified = out.worst_slack > out.grid_drift;
  return out;
}

void check_regions(const RegionGeometry& regions, Int tau2) {
  const auto& x = regions.endpoints;
  constexpr double tol = 1e-12;
  auto fail = [](const std::string& why) {
    throw MapError(MapError::Kind::invalid_regions, why);
  };
  if (!(x[0] < x[1] && x[1] < x[2] && x[2] < x[3] && x[3] < x[0] + 1.0)) {
    fail("region endpoints must satisfy x1 < x2 < x3 < x4 < x1 + 1");
  }
  const double len1 = x[1] - x[0];
  const double len3 = x[3] - x[2];
  const double delta = 0.5 * len1;
  const double t2 = static_cast<double>(tau2);
  const double half = std::floor((t2 - 1.0) / 2.0);
  if (std::abs(len1 - len3) > tol) fail("critical intervals I1 and I3 must have equal length");
  // Closed comparisons: the canonical odd-tau2 choice sits on these bounds.
  if (delta > 1.0 / (4.0 * t2) + tol) fail("delta must not exceed 1/(4 tau2)");
  if (x[2] - x[1] < half / t2 - tol || x[0] + 1.0 - x[3] < half / t2 - tol) {
    fail("good intervals I2, I4 must be longer than floor((tau2-1)/2)/tau2");
  }
  for (Int j = 0; j < tau2; ++j) {
    // Overlap of I1 + j/tau2 with I3, allowing contact at an endpoint.
    const double lo = reduce_circle(x[0] + static_cast<double>(j) / t2 - x[2]);
    const double lo_end = lo + len1;
    const bool overlap = lo < len3 - tol || (lo_end > 1.0 + tol && lo_end - 1.0 > tol);
    if (overlap) fail("a translate of I1 by a multiple of 1/tau2 meets I3");
  }
}

EndoMap::EndoMap(const MapSpec& spec, Preconditions pre)
    : input_(spec.linear),
      conj_(choose_conjugator(spec.linear, pre)),
      g_(conj_.unimodular_inverse() * input_ * conj_),
      g_real_(g_.to_real()),
      g_inv_(g_.real_inverse()),
      cosets_(g_),
      t_(spec.t),
      profile_(spec.profile),
      alpha_(spec.alpha),
      order_(spec.order),
      expansion_(expansion_constants(g_, spec.alpha)) {
  if (pre == Preconditions::relaxed) return;
  if (!(alpha_ > 1.0)) throw MapError(MapError::Kind::precondition, "alpha must exceed 1");
  if (!certify_alpha(g_, alpha_)) {
    throw MapError(MapError::Kind::uncertified_alpha,
                   "alpha does not certify E^{-1}(vertical cone) inside the horizontal cone");
  }
  check_regions(profile_.regions, tau2());
  const ProfileCheck pc = check_profile(profile_);
  if (!pc.sampled_ok) {
    throw MapError(MapError::Kind::invalid_profile,
                   "shear profile violates the derivative conditions on the grid");
  }
}

MapSpec EndoMap::spec() const { return {input_, t_, profile_, alpha_, order_}; }

Vec2 EndoMap::lift_evaluate(Vec2 p) const {
  if (order_ == Composition::EH) {
    return g_real_ * Vec2{p.x, p.y + shear(p.x)};
  }
  const Vec2 q = g_real_ * p;
  return {q.x, q.y + shear(q.x)};
}

Vec2 EndoMap::lift_inverse(Vec2 p) const {
  if (order_ == Composition::EH) {
    const Vec2 q = g_inv_ * p;
    return {q.x, q.y - shear(q.x)};
  }
  return g_inv_ * Vec2{p.x, p.y - shear(p.x)};
}

Vec2 EndoMap::evaluate(Vec2 x) const { return reduce_torus(lift_evaluate(x)); }

Mat2 EndoMap::derivative(Vec2 x) const {
  if (order_ == Composition::EH) return g_real_ * shear_jacobian(x.x);
  return shear_jacobian((g_real_ * x).x) * g_real_;
}

Mat2 EndoMap::inverse_derivative(Vec2 x) const {
  if (order_ == Composition::EH) return shear_jacobian_inverse(x.x) * g_inv_;
  return g_inv_ * shear_jacobian_inverse((g_real_ * x).x);
}

Vec2 EndoMap::lift_inverse_branch(Vec2 p, std::size_t symbol) const {
  if (symbol < 1 || symbol > degree()) throw std::out_of_range("branch symbol out of range");
  return lift_inverse(p + cosets_.representative(symbol - 1).to_real());
}

Mat2 EndoMap::lift_inverse_branch_derivative(Vec2 p, std::size_t symbol) const {
  return inverse_derivative(lift_inverse_branch(p, symbol));
}

std::vector<Vec2> EndoMap::preimages(Vec2 x) const {
  std::vector<Vec2> out;
  out.reserve(degree());
  for (std::size_t i = 1; i <= degree(); ++i) out.push_back(reduce_torus(lift_inverse_branch(x, i)));
  return out;
}

Region EndoMap::classify(Vec2 x) const {
  const auto& e = profile_.regions.endpoints;
  const double u = reduce_circle(x.x);
  if (in_closed_arc(u, e[0], e[1]) || in_closed_arc(u, e[2], e[3])) return Region::critical;
  return in_closed_arc(u, e[1], e[2]) ? Region::good_minus : Region::good_plus;
}

double EndoMap::distance_to_critical(Vec2 x) const {
  const auto& e = profile_.regions.endpoints;
  const double u = reduce_circle(x.x);
  return std::min(arc_distance(u, e[0], e[1]), arc_distance(u, e[2], e[3]));
}

}  // namespace nuh
