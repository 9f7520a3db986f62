#pragma once

// Exact integer 2x2 matrix algebra: Smith normal form, coset
// representatives of Z^2 / E(Z^2) and the normal-position conjugation
// that puts the preimage lattice in the form (1/tau2)Z x (1/tau1)Z.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuh/linalg.hpp"

namespace nuh {

using Int = std::int64_t;

/// Largest accepted absolute value of an input entry.
inline constexpr Int kMaxEntry = 1'000'000;

struct IntVec2 {
  Int x = 0;
  Int y = 0;

  IntVec2 operator+(IntVec2 o) const;
  IntVec2 operator-(IntVec2 o) const;
  bool operator==(const IntVec2&) const = default;

  Vec2 to_real() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

class IntMatError : public std::invalid_argument {
 public:
  enum class Kind { singular, homothety, overflow, out_of_range };

  IntMatError(Kind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(IntMatError::Kind kind);

struct IntMatrix2 {
  Int e11 = 1, e12 = 0;
  Int e21 = 0, e22 = 1;

  static IntMatrix2 identity() { return {}; }
  /// The coordinate swap J.
  static IntMatrix2 swap() { return {0, 1, 1, 0}; }
  static IntMatrix2 diagonal(Int a, Int b) { return {a, 0, 0, b}; }
  /// Row-major 4-array, as used in JSON.
  static IntMatrix2 from_row_major(const std::array<Int, 4>& e) {
    return {e[0], e[1], e[2], e[3]};
  }
  std::array<Int, 4> row_major() const { return {e11, e12, e21, e22}; }

  Int det() const;
  bool is_homothety() const { return e12 == 0 && e21 == 0 && e11 == e22; }
  bool is_unimodular() const;

  IntMatrix2 operator*(const IntMatrix2& o) const;
  IntVec2 operator*(IntVec2 v) const;
  bool operator==(const IntMatrix2&) const = default;

  /// Inverse of a unimodular matrix; throws for |det| != 1.
  IntMatrix2 unimodular_inverse() const;
  /// Adjugate, so that M * adj(M) = det(M) * Id.
  IntMatrix2 adjugate() const { return {e22, -e12, -e21, e11}; }

  Mat2 to_real() const;
  Mat2 real_inverse() const;
};

/// Throws IntMatError::out_of_range when an entry exceeds kMaxEntry and
/// IntMatError::singular when det == 0.
void validate_linear_part(const IntMatrix2& m);

Int gcd_of_entries(const IntMatrix2& m);

/// E = left * diag(tau1, tau2) * right with left, right unimodular,
/// 0 < tau1 | tau2.
struct SmithDecomposition {
  IntMatrix2 left;
  IntMatrix2 right;
  Int tau1 = 1;
  Int tau2 = 1;

  IntMatrix2 diagonal() const { return IntMatrix2::diagonal(tau1, tau2); }
};

SmithDecomposition smith_normal_form(const IntMatrix2& e);

/// Classifies integer vectors modulo E(Z^2). Representatives are
/// left * (i, j), 0 <= i < tau1, 0 <= j < tau2, in lexicographic (i, j)
/// order, so the zero class comes first.
class CosetIndex {
 public:
  explicit CosetIndex(const IntMatrix2& e);

  const IntMatrix2& matrix() const { return e_; }
  const SmithDecomposition& smith() const { return snf_; }
  std::size_t size() const { return reps_.size(); }
  const std::vector<IntVec2>& representatives() const { return reps_; }
  const IntVec2& representative(std::size_t index) const { return reps_[index]; }

  /// Zero-based index of the class of z.
  std::size_t index_of(IntVec2 z) const;
  bool in_image(IntVec2 z) const { return index_of(z) == 0; }

  /// The unique u with E u = z; throws std::logic_error when z is not in E(Z^2).
  IntVec2 solve(IntVec2 z) const;

 private:
  IntMatrix2 e_;
  SmithDecomposition snf_;
  IntMatrix2 left_inverse_;
  std::vector<IntVec2> reps_;
};

std::vector<IntVec2> coset_representatives(const IntMatrix2& e);

/// G = P^{-1} E P with G^{-1}(Z^2) = (1/tau2)Z x (1/tau1)Z and, for a
/// non-homothety, (0,1) not an eigenvector of G.
struct NormalPosition {
  IntMatrix2 conjugator;  // P
  IntMatrix2 normal;      // G
  Int shear = 0;          // k of the extra shear [[1,k],[0,1]]
  Int tau1 = 1;
  Int tau2 = 1;
};

/// Throws IntMatError::homothety for homotheties (every vector is an
/// eigenvector, so the vertical direction cannot be moved off one).
NormalPosition normalize_position(const IntMatrix2& e);

/// Exact check that g^{-1}(Z^2) == (1/tau2)Z x (1/tau1)Z.
bool has_normal_lattice(const IntMatrix2& g, Int tau1, Int tau2);

/// True when (0,1) is an eigenvector of m, i.e. m.e12 == 0.
inline bool fixes_vertical(const IntMatrix2& m) { return m.e12 == 0; }

}  // namespace nuh
