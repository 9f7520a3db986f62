#include "nuh/bounds.hpp"

#include <cmath>

#include "nuh/errors.hpp"

namespace nuh {
namespace {

constexpr double kBracketHi = 1e9;
constexpr double kBisectionTol = 1e-6;

void require_positive(const BoundInputs& inp) {
  if (inp.tau2 < 5) throw MapError(MapError::Kind::precondition, "bounds require tau2 >= 5");
  if (!(inp.alpha > 1.0)) throw MapError(MapError::Kind::precondition, "alpha must exceed 1");
  if (!(inp.a > 0.0 && inp.b > inp.a && inp.e_v > 0.0 && inp.e_h > 0.0)) {
    throw MapError(MapError::Kind::precondition, "need 0 < a < b and positive expansion constants");
  }
}

void require_t(const BoundInputs& inp) {
  require_positive(inp);
  if (!(inp.t > 2.0 * inp.alpha / inp.a)) {
    throw MapError(MapError::Kind::precondition, "layer bounds need t > 2 alpha / a");
  }
}

// C(t) with the corrections a - alpha/t and b + 1/t replaced by the given
// values.
double constant_with(const BoundInputs& inp, double a_eff, double b_eff) {
  const double m = static_cast<double>(good_half_count(inp.tau2));
  const double tau = static_cast<double>(inp.tau2);
  return m / (1.0 + m) * std::log(inp.e_v / inp.alpha) + 1.0 / (1.0 + m) * std::log(inp.e_h) +
         (tau - 1.0) * m / (tau * (1.0 + m)) * std::log(a_eff) +
         (m - tau) / (tau * (1.0 + m)) * std::log(b_eff);
}

double rhs_for(Condition cond, std::optional<double> c_det) {
  if (cond == Condition::nuh) return 0.0;
  if (!c_det) throw std::invalid_argument("U1 threshold needs C_det");
  return -0.5 * *c_det;
}

}  // namespace

BoundInputs BoundInputs::for_map(const EndoMap& f) {
  BoundInputs inp;
  inp.tau2 = f.tau2();
  inp.alpha = f.alpha();
  inp.a = f.profile().a;
  inp.b = f.profile().b;
  inp.e_v = f.expansion().e_v;
  inp.e_h = f.expansion().e_h;
  inp.t = f.t();
  return inp;
}

BoundInputs BoundInputs::for_family(int k, double t) {
  const MapSpec spec = MapSpec::standard_family(k, t);
  const ExpansionConstants ex = expansion_constants(spec.linear, spec.alpha);
  return {smith_normal_form(spec.linear).tau2, spec.alpha, spec.profile.a, spec.profile.b,
          ex.e_v, ex.e_h, t};
}

Int good_half_count(Int tau2) { return (tau2 - 1) / 2; }

LayerBounds layer_bounds(const BoundInputs& inp) {
  require_t(inp);
  const double tau = static_cast<double>(inp.tau2);
  const double m = static_cast<double>(good_half_count(inp.tau2));
  const double lt = std::log(inp.t);
  const double pv = 1.0 - 1.0 / tau;
  const double ph = 1.0 - m / tau;
  return {pv * lt + std::log(inp.e_v / inp.alpha) + pv * std::log(inp.a - inp.alpha / inp.t),
          -ph * lt + std::log(inp.e_h) - ph * std::log(inp.b + 1.0 / inp.t)};
}

double certificate_slope(Int tau2) {
  const double m = static_cast<double>(good_half_count(tau2));
  return (m - 1.0) / (m + 1.0);
}

Certificate asymptotic_certificate(const BoundInputs& inp) {
  require_t(inp);
  Certificate c;
  c.slope = certificate_slope(inp.tau2);
  c.constant = constant_with(inp, inp.a - inp.alpha / inp.t, inp.b + 1.0 / inp.t);
  c.value = c.slope * std::log(inp.t) + c.constant;
  return c;
}

const char* to_string(Condition c) { return c == Condition::nuh ? "nuh" : "u1"; }

Condition condition_from_string(const std::string& s) {
  if (s == "nuh" || s == "NUH") return Condition::nuh;
  if (s == "u1" || s == "U1") return Condition::u1;
  throw std::invalid_argument("condition must be nuh or u1, got '" + s + "'");
}

ThresholdCheck check_threshold(const BoundInputs& inp, Condition cond, double c_det) {
  ThresholdCheck chk;
  chk.t = inp.t;
  chk.lhs = asymptotic_certificate(inp).value;
  chk.rhs = rhs_for(cond, c_det);
  chk.satisfied = chk.lhs > chk.rhs;
  return chk;
}

ThresholdReport solve_threshold(const BoundInputs& inp, Condition cond,
                                std::optional<double> c_det,
                                const std::vector<double>& check_ts) {
  require_positive(inp);
  ThresholdReport rep;
  rep.condition = cond;
  rep.tau2 = inp.tau2;
  rep.slope = certificate_slope(inp.tau2);
  rep.rhs = rhs_for(cond, c_det);
  if (!(rep.slope > 0.0)) throw NumericalFailure("certificate slope is not positive");

  auto excess = [&](double t) {
    BoundInputs at = inp;
    at.t = t;
    return asymptotic_certificate(at).value - rep.rhs;
  };

  double lo = 2.0 * inp.alpha / inp.a * (1.0 + 1e-9);
  double hi = kBracketHi;
  // Monotone on the bracket, checked on a log-spaced grid.
  double prev = excess(lo);
  for (int i = 1; i <= 400; ++i) {
    const double t = lo * std::pow(hi / lo, i / 400.0);
    const double cur = excess(t);
    if (cur < prev) throw NumericalFailure("certificate is not increasing on the bracket");
    prev = cur;
  }
  if (excess(lo) > 0.0) {
    throw NumericalFailure("certificate already holds at the lower end of the bracket");
  }
  if (!(excess(hi) > 0.0)) throw NumericalFailure("no threshold below t = 1e9");
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  rep.minimal_t = hi;
  BoundInputs at = inp;
  at.t = hi;
  rep.constant_at_minimal = asymptotic_certificate(at).constant;
  rep.leading_order_t = std::exp((rep.rhs - constant_with(inp, inp.a, inp.b)) / rep.slope);

  for (double t : check_ts) {
    BoundInputs ct = inp;
    ct.t = t;
    ThresholdCheck chk;
    chk.t = t;
    chk.rhs = rep.rhs;
    chk.lhs = asymptotic_certificate(ct).value;
    chk.satisfied = chk.lhs > chk.rhs;
    if (chk.satisfied) rep.satisfied_at.push_back(t);
    rep.checks.push_back(chk);
  }
  return rep;
}

double segment_threshold(const BoundInputs& inp) {
  if (!(inp.alpha > 1.0)) throw MapError(MapError::Kind::precondition, "alpha must exceed 1");
  if (!(inp.a > 0.0 && inp.e_v > 0.0)) {
    throw MapError(MapError::Kind::precondition, "a and e_v must be positive");
  }
  const double al = inp.alpha;
  return std::max(2.0 * al / inp.a, (4.0 * al * al + al * inp.e_v) / (inp.e_v * inp.a));
}

CocycleComparison compare_scaled_cocycle(const EndoMap& f, Vec2 x, Vec2 v, int n) {
  CocycleComparison out;
  const double scale = std::sqrt(static_cast<double>(f.degree()));
  out.scale_log = std::log(scale);
  Vec2 u = normalized_max(v);
  Vec2 w = u;
  for (int i = 0; i < n; ++i) {
    const Mat2 d = f.derivative(x);
    u = d * u;
    w = (d * (1.0 / scale)) * w;
    const double nu = max_norm(u);
    const double nw = max_norm(w);
    out.log_norm_map += std::log(nu);
    out.log_norm_scaled += std::log(nw);
    u = u / nu;
    w = w / nw;
    x = f.evaluate(x);
  }
  return out;
}

}  // namespace nuh
