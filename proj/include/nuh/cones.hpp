#pragma once

// Max-norm cone geometry. The horizontal cone {|u2| <= alpha |u1|} is
// closed, the vertical cone is its (open) complement.

#include <optional>
#include <span>
#include <stdexcept>

#include "nuh/intmat.hpp"
#include "nuh/linalg.hpp"

namespace nuh {

enum class ConeKind { vertical, horizontal };

const char* to_string(ConeKind kind);

struct Cone {
  double alpha = 2.0;
  ConeKind kind = ConeKind::vertical;
};

inline bool in_horizontal_cone(Vec2 v, double alpha) {
  return std::abs(v.y) <= alpha * std::abs(v.x);
}

/// Same as !in_horizontal_cone, for nonzero v.
inline bool in_vertical_cone(Vec2 v, double alpha) {
  return std::abs(v.y) > alpha * std::abs(v.x);
}

/// Throws std::invalid_argument for the zero vector.
bool contains(const Cone& cone, Vec2 v);

/// Which cone a nonzero vector belongs to; ties go to horizontal.
ConeKind classify_direction(Vec2 v, double alpha);

/// A closed arc of directions (lines through the origin): the lines from
/// `first` to `last`, sweeping through `interior`.
struct DirectionArc {
  Vec2 first;
  Vec2 last;
  Vec2 interior;
};

/// The closure of the vertical cone as an arc of directions.
DirectionArc vertical_arc(double alpha);

/// Whether the image m(arc) lies in the given cone. With
/// `open_endpoints`, the arc endpoints are excluded (the arc is the open
/// one), so they only need to land in the closure of the target.
bool arc_maps_into(const Mat2& m, const DirectionArc& arc, const Cone& target,
                   bool open_endpoints = false);

/// E^{-1} maps the (open) vertical cone into the interior of the
/// horizontal cone. Decided on the images of the two boundary rays and the
/// vertical ray, which bound the image sector because E^{-1} is linear.
bool certify_alpha(const IntMatrix2& e, double alpha);

/// Stronger form: the closure of E^{-1} of the vertical cone lies in the
/// interior of the horizontal cone.
bool certify_alpha_strict(const IntMatrix2& e, double alpha);

/// Coarse grid search for a certified alpha; heuristic, returns the
/// smallest grid value that certifies.
std::optional<double> search_alpha(const IntMatrix2& e, std::span<const double> grid);

/// inf of ||m v||_max over max-norm unit vectors in the closure of the cone.
double min_norm_on_cone(const Mat2& m, const Cone& cone);

/// inf over unit v in the (closed) cone of ||E^{-1} v||_max.
double min_expansion(const IntMatrix2& e, const Cone& cone);

struct ExpansionConstants {
  double e_v = 0.0;
  double e_h = 0.0;
};

ExpansionConstants expansion_constants(const IntMatrix2& e, double alpha);

}  // namespace nuh
