#pragma once

// Symbolic coding of backward orbits: words over the preimage branches,
// the carry maps psi_v, cylinder measures and Monte-Carlo exponents on the
// natural extension.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nuh/endo.hpp"
#include "nuh/errors.hpp"
#include "nuh/rng.hpp"

namespace nuh {

/// Symbols in 1..d.
using SymbolWord = std::vector<std::size_t>;

struct PsiResult {
  SymbolWord word;
  /// carries[0] = v, carries[n] = u_n.
  std::vector<IntVec2> carries;
  IntVec2 final_carry() const { return carries.back(); }
};

/// tau_n is the class of w_{omega_n} - u_{n-1}; u_n solves
/// E u_n = w_{tau_n} - w_{omega_n} + u_{n-1}. Exact integer arithmetic.
PsiResult psi(const CosetIndex& cosets, IntVec2 v, const SymbolWord& omega);

/// F_{omega_n} o ... o F_{omega_1}(p) in the plane.
Vec2 apply_word(const EndoMap& f, Vec2 p, const SymbolWord& omega);

/// |det D(F_{omega_n} o ... o F_{omega_1})(p)| by the chain rule.
double cylinder_measure(const EndoMap& f, Vec2 p, const SymbolWord& omega);

struct BackwardOrbit {
  Vec2 base;
  SymbolWord word;
  /// Plane points p_0 = base, p_i = F_{omega_i}(p_{i-1}).
  std::vector<Vec2> lift;
  /// Torus points x_i = p_i mod 1.
  std::vector<Vec2> points;
};

/// Draws omega_i with probability proportional to |det DF(x_i)|, i.e. a
/// sample of the fiber measure on depth-n cylinders.
BackwardOrbit sample_backward_orbit(const EndoMap& f, Vec2 x, int n, CounterRng& rng);

struct ExponentEstimate {
  double value = 0.0;
  int n = 0;
  std::size_t samples = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  bool unconverged = false;  // n < 100
};

struct ExponentConfig {
  int n = 1000;
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  /// Base points; empty means uniform random points.
  std::vector<Vec2> base_points;
  std::uint64_t budget = 100'000'000;  // n * samples
};

struct ExponentPair {
  ExponentEstimate plus;
  ExponentEstimate minus;
};

/// chi^+ by forward iteration, chi^- as minus the mean of
/// (1/n) log ||(D f^n(x_n))^{-1} v|| over sampled backward orbits.
ExponentPair estimate_exponents(const EndoMap& f, const ExponentConfig& cfg);

/// Mean and standard error of a sample, with pairwise summation.
struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
};
SampleSummary summarize(const std::vector<double>& xs);

struct SolenoidCheckConfig {
  std::size_t instances = 1000;
  int depth = 8;
  int cylinder_depth = 3;
  std::size_t draws = 100'000;
  std::uint64_t seed = 1;
};

struct SolenoidCheckReport {
  std::size_t identity_failures = 0;
  std::size_t group_law_failures = 0;
  std::size_t carry_failures = 0;       // E u_n = w_tau - w_omega + u_{n-1}
  std::size_t difference_failures = 0;  // plane difference equals u_n
  double max_difference_error = 0.0;
  double cylinder_sum_error = 0.0;      // worst over depths 1..cylinder_depth
  double refinement_error = 0.0;
  double symbol_max_z = 0.0;            // worst |z| of single-symbol counts
  double chi2 = 0.0;                    // depth-2 cylinder frequencies
  double chi2_dof = 0.0;
  double chi2_z = 0.0;                  // (chi2 - dof) / sqrt(2 dof)
  bool passed = false;
};

SolenoidCheckReport run_solenoid_checks(const EndoMap& f, const SolenoidCheckConfig& cfg);

struct ContinuityPoint {
  double t = 0.0;
  ExponentPair estimate;
};

struct ContinuityIncrement {
  double t_from = 0.0;
  double t_to = 0.0;
  double increment = 0.0;  // |chi^- (t_to) - chi^- (t_from)|
  double envelope = 0.0;
  bool within = false;
};

struct ContinuityScan {
  std::vector<ContinuityPoint> points;
  double fitted_slope = 0.0;     // least squares of chi^- against log t
  double residual_scale = 0.0;   // 1.4826 * MAD of the fit residuals
  std::vector<ContinuityIncrement> increments;
  bool passed = false;
};

/// Exponent estimates over a list of t for a fixed linear part and profile.
/// The envelope for consecutive t is
///   |slope| dlog t + 3 sqrt(se_1^2 + se_2^2) + 3 residual_scale.
/// A smoke test for continuity, not a proof.
ContinuityScan continuity_scan(const MapSpec& base, const std::vector<double>& ts,
                               const ExponentConfig& cfg);

}  // namespace nuh
