// Acceptance runner: one [PASS]/[FAIL] line per criterion, followed by
// indented detail lines. With no argument every criterion runs; the exit
// code is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lemma_suites.hpp"
#include "nuh/bounds.hpp"
#include "nuh/estimator.hpp"
#include "nuh/segments.hpp"
#include "nuh/solenoid.hpp"

using namespace nuh;

namespace {

// Pinned tolerances and sizes.
constexpr double kRelativeEval = 1e-9;        // threshold inequality sides
constexpr double kMinimalShrink = 1e-4;       // minimal t * (1 - this) must fail
constexpr double kCocycleTol = 1e-9;          // standard-map identity
constexpr std::size_t kCocycleOrbits = 1000;
constexpr int kCocycleLength = 100;
constexpr int kLyapN = 1000;
constexpr std::size_t kLyapSamples = 10'000;
constexpr double kPairingTol = 0.05;          // |chi+ + chi- - log 25|
constexpr double kChiMinusCeiling = -1.0;
constexpr std::size_t kLemmaSamples = 10'000;
constexpr int kProportionDepth = 3;
constexpr std::size_t kProportionSamples = 200;
constexpr std::size_t kSegmentTrials = 100;
constexpr std::size_t kGuidedCurves = 20;
constexpr int kGuidedSteps = 50;
constexpr std::size_t kScanSamples = 2000;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// --- thresholds -------------------------------------------------------------

Outcome thresholds() {
  struct Quoted {
    int k;
    Condition cond;
    double t;
  };
  const std::vector<Quoted> quoted = {{2, Condition::nuh, 1042.0}, {3, Condition::nuh, 216.0},
                                      {5, Condition::nuh, 151.0},  {2, Condition::u1, 10.02},
                                      {3, Condition::u1, 6.29}};
  Outcome o;
  o.pass = true;
  int ok = 0;
  for (const Quoted& q : quoted) {
    const BoundInputs inp = BoundInputs::for_family(q.k, q.t);
    const double log_d = 2.0 * std::log(2.0 * q.k + 1.0);
    const ThresholdCheck at = check_threshold(inp, q.cond, log_d);
    const ThresholdReport rep = solve_threshold(inp, q.cond, log_d);
    BoundInputs below = inp;
    below.t = rep.minimal_t * (1.0 - kMinimalShrink);
    const bool fails_below = !check_threshold(below, q.cond, log_d).satisfied;
    const double margin = at.lhs - at.rhs;
    const double scale = std::max({std::abs(at.lhs), std::abs(at.rhs), 1.0});
    // A margin inside the evaluation tolerance would be undecided; report it.
    const bool decided = std::abs(margin) > kRelativeEval * scale;
    const bool holds = decided && margin > 0.0;
    const bool min_ok = rep.minimal_t <= q.t;
    const bool row = holds && min_ok && fails_below;
    ok += row;
    o.pass = o.pass && row;
    std::ostringstream os;
    os << (row ? "ok   " : "FAIL ") << "k=" << q.k << ' ' << to_string(q.cond) << " t=" << q.t
       << ": lhs-rhs=" << fmt("%.6e", margin) << " minimal_t=" << fmt("%.6f", rep.minimal_t)
       << " leading_order_t=" << fmt("%.4f", rep.leading_order_t)
       << " fails_at_minimal*(1-1e-4)=" << (fails_below ? "yes" : "no");
    o.details.push_back(os.str());
  }
  o.summary = std::to_string(ok) + "/" + std::to_string(quoted.size()) +
              " quoted values satisfy the certificate inequality";
  if (!o.pass) {
    o.details.push_back(
        "note: the failing rows miss by 5e-4 to 1e-2 in log units; the quoted values match "
        "the threshold with the 1/t corrections dropped (leading_order_t)");
  }
  return o;
}

// --- expanding standard map ------------------------------------------------

Outcome standard_map() {
  Outcome o;
  const double t = 1043.0;
  const BoundInputs inp = BoundInputs::for_family(2, t);
  const double lhs = asymptotic_certificate(inp).value;
  // Ds = Df / 5, so the pullback rates of Ds exceed those of Df by log 5
  // and S_t is NUH when lhs + log 5 > 0.
  const double cocycle_cert = lhs + std::log(5.0);
  const bool cert_ok = cocycle_cert > 0.0;

  const EndoMap f = EndoMap::standard_family(2, t);
  double worst = 0.0;
  for (std::size_t k = 0; k < kCocycleOrbits; ++k) {
    CounterRng rng(1043, k);
    const Vec2 x = testing::random_point(rng);
    const Vec2 v = testing::random_unit(rng);
    const CocycleComparison c = compare_scaled_cocycle(f, x, v, kCocycleLength);
    worst = std::max(worst, std::abs(c.log_norm_map - kCocycleLength * std::log(5.0) -
                                     c.log_norm_scaled));
  }
  const bool id_ok = worst <= kCocycleTol;
  o.pass = cert_ok && id_ok;
  o.summary = "S_t certificate at t=1043 " + fmt("%.4f", cocycle_cert) +
              ", identity max error " + fmt("%.3e", worst);
  o.details.push_back("certificate for S_t (f certificate + log 5): " + fmt("%.6f", cocycle_cert) +
                      (cert_ok ? " > 0" : " <= 0"));
  o.details.push_back("NUH certificate for f itself at t=1043: " + fmt("%.6e", lhs) +
                      " (f-level threshold is 1043.6965)");
  o.details.push_back("identity over " + std::to_string(kCocycleOrbits) + " orbits of length " +
                      std::to_string(kCocycleLength) + ": max |error| " + fmt("%.3e", worst));
  return o;
}

// --- Lyapunov ---------------------------------------------------------------

Outcome lyapunov() {
  const EndoMap f = EndoMap::standard_family(2, 1042.0);
  ExponentConfig cfg;
  cfg.n = kLyapN;
  cfg.samples = kLyapSamples;
  cfg.seed = 1;
  const ExponentPair e = estimate_exponents(f, cfg);
  const double lo = e.minus.value - 1.96 * e.minus.std_error;
  const double hi = e.minus.value + 1.96 * e.minus.std_error;
  const double sum = e.plus.value + e.minus.value;
  const bool ci_ok = e.minus.value < 0.0 && hi < 0.0;
  const bool pair_ok = std::abs(sum - std::log(25.0)) <= kPairingTol;
  const bool ceil_ok = e.minus.value <= kChiMinusCeiling;
  Outcome o;
  o.pass = ci_ok && pair_ok && ceil_ok;
  o.summary = "chi- = " + fmt("%.4f", e.minus.value) + " (95% CI [" + fmt("%.4f", lo) + ", " +
              fmt("%.4f", hi) + "]), chi+ + chi- = " + fmt("%.5f", sum);
  o.details.push_back("chi+ = " + fmt("%.4f", e.plus.value) + " +- " + fmt("%.4f", e.plus.std_error));
  o.details.push_back("CI excludes 0: " + std::string(ci_ok ? "yes" : "no"));
  o.details.push_back("|sum - log 25| = " + fmt("%.5f", std::abs(sum - std::log(25.0))) +
                      " (tolerance 0.05)");
  o.details.push_back("chi- <= -1.0: " + std::string(ceil_ok ? "yes" : "no"));
  return o;
}

// --- figure -----------------------------------------------------------------

Outcome figure() {
  const EndoMap f = EndoMap::standard_family(2, 1.5);
  const PreimageConeReport r = preimage_cone_report(f, {0.594, 0.287}, 2);
  Outcome o;
  const FirstLevelBranch* first_failing = nullptr;
  for (const auto& b : r.branches) {
    if (b.cone_invariant) continue;
    if (!first_failing) first_failing = &b;
    o.details.push_back("failing branch " + std::to_string(b.symbol) + " at (" +
                        fmt("%.4f", b.point.x) + ", " + fmt("%.4f", b.point.y) + "): blue " +
                        std::to_string(b.blue_count) + ", red " + std::to_string(b.red_count));
  }
  const bool split_ok =
      first_failing && first_failing->blue_count == 10 && first_failing->red_count == 10;
  o.pass = r.branches.size() == 25 && r.invariant_count == 20 && split_ok;
  o.summary = std::to_string(r.branches.size()) + " preimages, " +
              std::to_string(r.invariant_count) + " cone-invariant; first failing branch split " +
              (first_failing ? std::to_string(first_failing->blue_count) + "/" +
                                   std::to_string(first_failing->red_count)
                             : std::string("n/a"));
  return o;
}

// --- lemma suites -----------------------------------------------------------

Outcome lemmas() {
  struct Case {
    int k;
    double t;
  };
  const std::vector<Case> cases = {{2, 3.0}, {2, 1042.0}, {3, 216.0}, {5, 151.0}};
  Outcome o;
  o.pass = true;
  std::size_t total = 0;
  for (const Case& c : cases) {
    const EndoMap f = EndoMap::standard_family(c.k, c.t);
    const std::uint64_t s = 1000 * c.k;
    const std::size_t v1 = testing::preimage_distribution_violations(f, kLemmaSamples, s + 1);
    const std::size_t v2 = testing::shear_cone_violations(f, kLemmaSamples, s + 2);
    const std::size_t v3 = testing::map_cone_violations(f, kLemmaSamples, s + 3);
    const std::size_t v4 = testing::good_pullback_violations(f, kLemmaSamples, s + 4);
    total += v1 + v2 + v3 + v4;
    o.details.push_back("k=" + std::to_string(c.k) + " t=" + fmt("%g", c.t) +
                        ": preimage counts " + std::to_string(v1) + ", shear cones " +
                        std::to_string(v2) + ", map cones " + std::to_string(v3) +
                        ", vertical pullbacks " + std::to_string(v4) + " violations");
  }
  // Good-fraction bound, brute force over full trees.
  std::size_t bound_violations = 0;
  const EndoMap f = EndoMap::standard_family(2, 1042.0);
  for (std::size_t k = 0; k < kProportionSamples; ++k) {
    CounterRng rng(77, k);
    const auto st = pullback_tree(
        f, TangentSample::make(testing::random_point(rng), testing::random_unit(rng)),
        kProportionDepth);
    for (int n = 0; n <= kProportionDepth; ++n) {
      bound_violations += st.a[n] < good_fraction_bound(5, n).convert_to<double>();
    }
  }
  o.details.push_back("good-fraction bound a_n >= m/(1+m)(1-c^n), n <= 3, " +
                      std::to_string(kProportionSamples) + " trees: " +
                      std::to_string(bound_violations) + " violations");
  total += bound_violations;
  o.pass = total == 0;
  o.summary = std::to_string(total) + " violations over " + std::to_string(cases.size()) +
              " maps x 4 suites x " + std::to_string(kLemmaSamples) + " samples";
  return o;
}

// --- appendix ---------------------------------------------------------------

Outcome appendix() {
  SolenoidCheckConfig cfg;  // 1000 instances, depth 8, cylinders to depth 3
  const SolenoidCheckReport r = run_solenoid_checks(EndoMap::standard_family(2, 1042.0), cfg);
  Outcome o;
  o.pass = r.passed;
  o.summary = "identity " + std::to_string(r.identity_failures) + ", group law " +
              std::to_string(r.group_law_failures) + ", carries " +
              std::to_string(r.carry_failures) + ", plane differences " +
              std::to_string(r.difference_failures) + " failures; chi2 z " + fmt("%.2f", r.chi2_z);
  o.details.push_back("max plane-difference error " + fmt("%.3e", r.max_difference_error));
  o.details.push_back("cylinder normalization error " + fmt("%.3e", r.cylinder_sum_error) +
                      ", refinement error " + fmt("%.3e", r.refinement_error));
  o.details.push_back("chi2 " + fmt("%.1f", r.chi2) + " on " + fmt("%.0f", r.chi2_dof) +
                      " dof, max single-symbol |z| " + fmt("%.2f", r.symbol_max_z));
  return o;
}

// --- v-segments -------------------------------------------------------------

Outcome segments() {
  Outcome o;
  o.pass = true;
  const double threshold = segment_threshold(BoundInputs::for_family(2, 0.0));
  std::ostringstream sum;
  for (double t : {std::ceil(threshold), 50.0, 1042.0}) {
    const EndoMap f = EndoMap::standard_family(2, t);
    const SegmentPullbackResult sp = random_segment_pullbacks(f, kSegmentTrials, 11);
    const GuidedResult g = guided_backward_experiment(f, kGuidedCurves, kGuidedSteps, 12);
    const bool row = sp.successes == sp.trials && g.reached == g.curves;
    o.pass = o.pass && row;
    int worst = 0;
    for (int s : g.steps) worst = std::max(worst, s);
    o.details.push_back((row ? "ok   t=" : "FAIL t=") + fmt("%g", t) + ": " +
                        std::to_string(sp.successes) + "/" + std::to_string(sp.trials) +
                        " segments with a v-subsegment branch, " + std::to_string(g.reached) +
                        "/" + std::to_string(g.curves) + " guided curves (max steps " +
                        std::to_string(worst) + ")");
  }
  // The h o E order, reported for comparison only.
  MapSpec he = MapSpec::standard_family(2, 50.0);
  he.order = Composition::HE;
  const EndoMap fhe(he);
  const SegmentPullbackResult sp = random_segment_pullbacks(fhe, kSegmentTrials, 11);
  const GuidedResult g = guided_backward_experiment(fhe, kGuidedCurves, kGuidedSteps, 12);
  o.details.push_back("info HE order t=50: " + std::to_string(sp.successes) + "/" +
                      std::to_string(sp.trials) + " segments, " + std::to_string(g.reached) + "/" +
                      std::to_string(g.curves) + " guided curves");
  o.summary = "segment threshold " + fmt("%.3f", threshold) + "; E o h order at t = " +
              fmt("%g", std::ceil(threshold)) + ", 50, 1042";
  return o;
}

// --- continuity -------------------------------------------------------------

Outcome continuity() {
  std::vector<double> ts = {10.02};
  for (int t = 11; t <= 20; ++t) ts.push_back(t);
  ExponentConfig cfg;
  cfg.samples = kScanSamples;
  const ContinuityScan s = continuity_scan(MapSpec::standard_family(2, 0.0), ts, cfg);
  Outcome o;
  o.pass = s.passed;
  std::size_t within = 0;
  for (const auto& inc : s.increments) {
    within += inc.within;
    o.details.push_back(fmt("t %5.2f", inc.t_from) + fmt(" -> %5.2f", inc.t_to) +
                        ": |dchi-| " + fmt("%.4f", inc.increment) + " <= envelope " +
                        fmt("%.4f", inc.envelope) + (inc.within ? "" : "  EXCEEDED"));
  }
  o.summary = std::to_string(within) + "/" + std::to_string(s.increments.size()) +
              " increments within envelope (slope " + fmt("%.4f", s.fitted_slope) +
              " per log t; non-rigorous smoke test)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"thresholds", thresholds}, {"standard_map", standard_map}, {"lyapunov", lyapunov},
      {"figure", figure},         {"lemmas", lemmas},             {"appendix", appendix},
      {"segments", segments},     {"continuity", continuity}};
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_ok = true;
  std::size_t ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.summary << " ("
              << fmt("%.2f", secs) << " s)\n";
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    all_ok = all_ok && o.pass;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion\n";
    return 2;
  }
  return all_ok ? 0 : 1;
}
