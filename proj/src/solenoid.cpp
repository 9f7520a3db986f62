#include "nuh/solenoid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nuh/parallel.hpp"

namespace nuh {
namespace {

void check_symbol(std::size_t s, std::size_t d) {
  if (s < 1 || s > d) throw std::out_of_range("symbol outside 1..d");
}

Vec2 random_direction(CounterRng& rng) {
  const double th = 2.0 * std::numbers::pi * rng.uniform();
  return normalized_max({std::cos(th), std::sin(th)});
}

std::size_t pick_symbol(const EndoMap& f, Vec2 p, CounterRng& rng) {
  const std::size_t d = f.degree();
  if (f.has_constant_jacobian()) return 1 + static_cast<std::size_t>(rng.below(d));
  std::vector<double> w(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    w[i] = std::abs(f.lift_inverse_branch_derivative(p, i + 1).det());
    total += w[i];
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < d; ++i) {
    if (u < w[i]) return i + 1;
    u -= w[i];
  }
  return d;
}

}  // namespace

PsiResult psi(const CosetIndex& cosets, IntVec2 v, const SymbolWord& omega) {
  const std::size_t d = cosets.size();
  PsiResult out;
  out.carries.reserve(omega.size() + 1);
  out.carries.push_back(v);
  IntVec2 u = v;
  for (std::size_t s : omega) {
    check_symbol(s, d);
    const IntVec2& w_omega = cosets.representative(s - 1);
    const std::size_t tau = cosets.index_of(w_omega - u) + 1;
    const IntVec2 z = cosets.representative(tau - 1) - w_omega + u;
    u = cosets.solve(z);
    out.word.push_back(tau);
    out.carries.push_back(u);
  }
  return out;
}

Vec2 apply_word(const EndoMap& f, Vec2 p, const SymbolWord& omega) {
  for (std::size_t s : omega) p = f.lift_inverse_branch(p, s);
  return p;
}

double cylinder_measure(const EndoMap& f, Vec2 p, const SymbolWord& omega) {
  double m = 1.0;
  for (std::size_t s : omega) {
    m *= std::abs(f.lift_inverse_branch_derivative(p, s).det());
    p = f.lift_inverse_branch(p, s);
  }
  return m;
}

BackwardOrbit sample_backward_orbit(const EndoMap& f, Vec2 x, int n, CounterRng& rng) {
  if (n < 0) throw std::invalid_argument("orbit length must be non-negative");
  BackwardOrbit out;
  out.base = x;
  out.lift.reserve(n + 1);
  out.points.reserve(n + 1);
  out.lift.push_back(x);
  out.points.push_back(reduce_torus(x));
  Vec2 p = x;
  for (int i = 0; i < n; ++i) {
    const std::size_t s = pick_symbol(f, p, rng);
    p = f.lift_inverse_branch(p, s);
    out.word.push_back(s);
    out.lift.push_back(p);
    out.points.push_back(reduce_torus(p));
  }
  return out;
}

SampleSummary summarize(const std::vector<double>& xs) {
  SampleSummary s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = pairwise_sum(xs) / n;
  if (xs.size() < 2) return s;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - s.mean) * (xs[i] - s.mean);
  s.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0)) / std::sqrt(n);
  return s;
}

ExponentPair estimate_exponents(const EndoMap& f, const ExponentConfig& cfg) {
  if (cfg.n < 1 || cfg.samples < 1) throw std::invalid_argument("need n >= 1 and samples >= 1");
  const std::uint64_t work = static_cast<std::uint64_t>(cfg.n) * cfg.samples;
  if (work / cfg.samples != static_cast<std::uint64_t>(cfg.n) || work > cfg.budget) {
    throw BudgetExceeded(work, cfg.budget);
  }

  struct PerSample {
    double plus = 0.0;
    double minus = 0.0;
  };
  const auto results = parallel_map<PerSample>(cfg.samples, [&](std::size_t i) {
    CounterRng rng(cfg.seed, i);
    const Vec2 x0 = cfg.base_points.empty()
                        ? Vec2{rng.uniform(), rng.uniform()}
                        : cfg.base_points[i % cfg.base_points.size()];
    PerSample r;

    Vec2 x = x0;
    Vec2 v = random_direction(rng);
    double acc = 0.0;
    for (int k = 0; k < cfg.n; ++k) {
      v = f.derivative(x) * v;
      const double nv = max_norm(v);
      acc += std::log(nv);
      v = v / nv;
      x = f.evaluate(x);
    }
    r.plus = acc / cfg.n;

    // (D f^n(x_n))^{-1} = Df(x_n)^{-1} ... Df(x_1)^{-1}: the point nearest
    // the base acts first.
    Vec2 p = x0;
    Vec2 w = random_direction(rng);
    acc = 0.0;
    for (int k = 0; k < cfg.n; ++k) {
      p = f.lift_inverse_branch(p, pick_symbol(f, p, rng));
      w = f.inverse_derivative(reduce_torus(p)) * w;
      const double nw = max_norm(w);
      acc += std::log(nw);
      w = w / nw;
      // Keeping the lift bounded does not change the torus orbit.
      p = reduce_torus(p);
    }
    r.minus = -acc / cfg.n;
    return r;
  });

  std::vector<double> plus(results.size()), minus(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    plus[i] = results[i].plus;
    minus[i] = results[i].minus;
  }
  ExponentPair out;
  for (auto* e : {&out.plus, &out.minus}) {
    e->n = cfg.n;
    e->samples = cfg.samples;
    e->seed = cfg.seed;
    e->unconverged = cfg.n < 100;
  }
  const SampleSummary sp = summarize(plus);
  const SampleSummary sm = summarize(minus);
  out.plus.value = sp.mean;
  out.plus.std_error = sp.std_error;
  out.minus.value = sm.mean;
  out.minus.std_error = sm.std_error;
  return out;
}

namespace {

SymbolWord random_word(CounterRng& rng, std::size_t d, int n) {
  SymbolWord w(static_cast<std::size_t>(n));
  for (auto& s : w) s = 1 + static_cast<std::size_t>(rng.below(d));
  return w;
}

IntVec2 random_shift(CounterRng& rng) {
  return {static_cast<Int>(rng.below(9)) - 4, static_cast<Int>(rng.below(9)) - 4};
}

// Recursively sums cylinder measures over all words of the given depth.
double total_measure(const EndoMap& f, Vec2 p, int depth, double acc) {
  if (depth == 0) return acc;
  double s = 0.0;
  for (std::size_t i = 1; i <= f.degree(); ++i) {
    const double m = std::abs(f.lift_inverse_branch_derivative(p, i).det());
    s += total_measure(f, f.lift_inverse_branch(p, i), depth - 1, acc * m);
  }
  return s;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

SolenoidCheckReport run_solenoid_checks(const EndoMap& f, const SolenoidCheckConfig& cfg) {
  const CosetIndex& cosets = f.cosets();
  const std::size_t d = f.degree();
  const IntMatrix2& g = f.linear();
  SolenoidCheckReport rep;

  for (std::size_t k = 0; k < cfg.instances; ++k) {
    CounterRng rng(cfg.seed, k);
    const SymbolWord omega = random_word(rng, d, cfg.depth);

    const PsiResult id = psi(cosets, {0, 0}, omega);
    bool id_ok = id.word == omega;
    for (const IntVec2& u : id.carries) id_ok = id_ok && u == IntVec2{0, 0};
    if (!id_ok) ++rep.identity_failures;

    const IntVec2 v = random_shift(rng);
    const IntVec2 w = random_shift(rng);
    const PsiResult pv = psi(cosets, v, omega);
    const PsiResult pw_after = psi(cosets, w, pv.word);
    const PsiResult pvw = psi(cosets, v + w, omega);
    if (pvw.word != pw_after.word ||
        !(pvw.final_carry() == pv.final_carry() + pw_after.final_carry())) {
      ++rep.group_law_failures;
    }

    for (std::size_t i = 0; i < omega.size(); ++i) {
      const IntVec2 lhs = g * pv.carries[i + 1];
      const IntVec2 rhs =
          cosets.representative(pv.word[i] - 1) - cosets.representative(omega[i] - 1) + pv.carries[i];
      if (!(lhs == rhs)) {
        ++rep.carry_failures;
        break;
      }
    }

    // One step at a time from torus points: composing the words directly
    // amplifies rounding by |DF| ~ t per step.
    Vec2 x{rng.uniform(), rng.uniform()};
    double err = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const Vec2 moved = f.lift_inverse_branch(x + pv.carries[i].to_real(), pv.word[i]);
      const Vec2 base = f.lift_inverse_branch(x, omega[i]);
      err = std::max(err, max_norm(moved - base - pv.carries[i + 1].to_real()));
      x = reduce_torus(base);
    }
    rep.max_difference_error = std::max(rep.max_difference_error, err);
    if (!(err <= 1e-9)) ++rep.difference_failures;
  }

  CounterRng rng(cfg.seed, cfg.instances + 1);
  const Vec2 x{rng.uniform(), rng.uniform()};
  for (int n = 1; n <= cfg.cylinder_depth; ++n) {
    rep.cylinder_sum_error = std::max(rep.cylinder_sum_error, std::abs(total_measure(f, x, n, 1.0) - 1.0));
  }
  for (std::size_t k = 0; k < 200; ++k) {
    CounterRng wr(cfg.seed ^ 0x5bd1e995ULL, k);
    const SymbolWord w = random_word(wr, d, 1 + static_cast<int>(wr.below(
                                                  static_cast<std::uint64_t>(std::max(1, cfg.cylinder_depth - 1)))));
    double children = 0.0;
    for (std::size_t s = 1; s <= d; ++s) {
      SymbolWord c = w;
      c.push_back(s);
      children += cylinder_measure(f, x, c);
    }
    rep.refinement_error = std::max(rep.refinement_error, std::abs(children - cylinder_measure(f, x, w)));
  }

  // Empirical depth-2 cylinder frequencies from sampled orbits.
  std::vector<double> expected(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) expected[i * d + j] = cylinder_measure(f, x, {i + 1, j + 1});
  }
  std::vector<std::uint64_t> counts(d * d, 0), first(d, 0);
  for (std::size_t k = 0; k < cfg.draws; ++k) {
    CounterRng orng(cfg.seed + 0x9e37ULL, k);
    const BackwardOrbit o = sample_backward_orbit(f, x, 2, orng);
    ++counts[(o.word[0] - 1) * d + (o.word[1] - 1)];
    ++first[o.word[0] - 1];
  }
  const double n = static_cast<double>(cfg.draws);
  for (std::size_t i = 0; i < d * d; ++i) {
    const double e = n * expected[i];
    rep.chi2 += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
  }
  rep.chi2_dof = static_cast<double>(d * d - 1);
  rep.chi2_z = (rep.chi2 - rep.chi2_dof) / std::sqrt(2.0 * rep.chi2_dof);
  for (std::size_t i = 0; i < d; ++i) {
    double p = 0.0;
    for (std::size_t j = 0; j < d; ++j) p += expected[i * d + j];
    const double z = (static_cast<double>(first[i]) - n * p) / std::sqrt(n * p * (1.0 - p));
    rep.symbol_max_z = std::max(rep.symbol_max_z, std::abs(z));
  }

  rep.passed = rep.identity_failures == 0 && rep.group_law_failures == 0 &&
               rep.carry_failures == 0 && rep.difference_failures == 0 &&
               rep.cylinder_sum_error <= 1e-9 && rep.refinement_error <= 1e-9 &&
               std::abs(rep.chi2_z) <= 4.0 && rep.symbol_max_z <= 4.0;
  return rep;
}

ContinuityScan continuity_scan(const MapSpec& base, const std::vector<double>& ts,
                               const ExponentConfig& cfg) {
  if (ts.size() < 3) throw std::invalid_argument("continuity scan needs at least three t values");
  ContinuityScan out;
  std::vector<double> lx, ly;
  for (double t : ts) {
    MapSpec spec = base;
    spec.t = t;
    const EndoMap f(spec);
    out.points.push_back({t, estimate_exponents(f, cfg)});
    lx.push_back(std::log(t));
    ly.push_back(out.points.back().estimate.minus.value);
  }
  const double n = static_cast<double>(lx.size());
  const double mx = pairwise_sum(lx) / n;
  const double my = pairwise_sum(ly) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  out.fitted_slope = sxy / sxx;
  std::vector<double> res(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) res[i] = ly[i] - (my + out.fitted_slope * (lx[i] - mx));
  const double med = median(res);
  for (double& r : res) r = std::abs(r - med);
  out.residual_scale = 1.4826 * median(res);

  out.passed = true;
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const auto& p = out.points[i].estimate.minus;
    const auto& q = out.points[i + 1].estimate.minus;
    ContinuityIncrement inc;
    inc.t_from = out.points[i].t;
    inc.t_to = out.points[i + 1].t;
    inc.increment = std::abs(q.value - p.value);
    inc.envelope = std::abs(out.fitted_slope) * std::abs(lx[i + 1] - lx[i]) +
                   3.0 * std::hypot(p.std_error, q.std_error) + 3.0 * out.residual_scale;
    inc.within = inc.increment <= inc.envelope;
    out.passed = out.passed && inc.within;
    out.increments.push_back(inc);
  }
  return out;
}

}  // namespace nuh
