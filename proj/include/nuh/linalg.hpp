#pragma once

#include <algorithm>
#include <cmath>

namespace nuh {

/// A vector in the plane (also used for torus points and tangent vectors).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double max_norm(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }
inline double euclidean_norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline Vec2 normalized_max(Vec2 v) { return v / max_norm(v); }

/// Real 2x2 matrix, row major.
struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static constexpr Mat2 identity() { return {}; }

  constexpr double det() const { return a11 * a22 - a12 * a21; }

  constexpr Vec2 operator*(Vec2 v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }

  constexpr Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }

  constexpr Mat2 operator*(double s) const {
    return {a11 * s, a12 * s, a21 * s, a22 * s};
  }

  /// Inverse; the caller guarantees det() != 0.
  constexpr Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
};

/// Operator norm induced by the max norm (maximum absolute row sum).
inline double max_operator_norm(const Mat2& m) {
  return std::max(std::abs(m.a11) + std::abs(m.a12),
                  std::abs(m.a21) + std::abs(m.a22));
}

}  // namespace nuh
