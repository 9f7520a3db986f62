#include "nuh/intmat.hpp"

#include <cstdlib>
#include <numeric>
#include <utility>

namespace nuh {
namespace {

Int checked_mul(Int a, Int b) {
  Int r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw IntMatError(IntMatError::Kind::overflow, "integer overflow in multiplication");
  }
  return r;
}

Int checked_add(Int a, Int b) {
  Int r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw IntMatError(IntMatError::Kind::overflow, "integer overflow in addition");
  }
  return r;
}

Int checked_sub(Int a, Int b) {
  Int r = 0;
  if (__builtin_sub_overflow(a, b, &r)) {
    throw IntMatError(IntMatError::Kind::overflow, "integer overflow in subtraction");
  }
  return r;
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int mod_pos(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

// Working matrix for the reduction, indexed [row][col].
using Work = std::array<std::array<Int, 2>, 2>;

// Row/column operations keep the invariant E = L * A * R.
struct Reducer {
  Work a;
  IntMatrix2 l = IntMatrix2::identity();
  IntMatrix2 r = IntMatrix2::identity();

  void swap_rows() {
    std::swap(a[0], a[1]);
    l = l * IntMatrix2::swap();
  }
  void swap_cols() {
    std::swap(a[0][0], a[0][1]);
    std::swap(a[1][0], a[1][1]);
    r = IntMatrix2::swap() * r;
  }
  // row[dst] += c * row[src]; L <- L * (I - c e_{dst,src})
  void add_row(int dst, int src, Int c) {
    for (int j = 0; j < 2; ++j) a[dst][j] = checked_add(a[dst][j], checked_mul(c, a[src][j]));
    IntMatrix2 inv = IntMatrix2::identity();
    (dst == 0 ? inv.e12 : inv.e21) = -c;
    l = l * inv;
  }
  // col[dst] += c * col[src]; R <- (I - c e_{src,dst}) * R
  void add_col(int dst, int src, Int c) {
    for (int i = 0; i < 2; ++i) a[i][dst] = checked_add(a[i][dst], checked_mul(c, a[i][src]));
    IntMatrix2 inv = IntMatrix2::identity();
    (src == 0 ? inv.e12 : inv.e21) = -c;
    r = inv * r;
  }
  void negate_row(int i) {
    a[i][0] = -a[i][0];
    a[i][1] = -a[i][1];
    IntMatrix2 inv = IntMatrix2::identity();
    (i == 0 ? inv.e11 : inv.e22) = -1;
    l = l * inv;
  }
};

}  // namespace

const char* to_string(IntMatError::Kind kind) {
  switch (kind) {
    case IntMatError::Kind::singular: return "singular";
    case IntMatError::Kind::homothety: return "homothety";
    case IntMatError::Kind::overflow: return "overflow";
    case IntMatError::Kind::out_of_range: return "out_of_range";
  }
  return "unknown";
}

IntVec2 IntVec2::operator+(IntVec2 o) const { return {checked_add(x, o.x), checked_add(y, o.y)}; }
IntVec2 IntVec2::operator-(IntVec2 o) const { return {checked_sub(x, o.x), checked_sub(y, o.y)}; }

Int IntMatrix2::det() const { return checked_sub(checked_mul(e11, e22), checked_mul(e12, e21)); }

bool IntMatrix2::is_unimodular() const {
  const Int d = det();
  return d == 1 || d == -1;
}

IntMatrix2 IntMatrix2::operator*(const IntMatrix2& o) const {
  return {checked_add(checked_mul(e11, o.e11), checked_mul(e12, o.e21)),
          checked_add(checked_mul(e11, o.e12), checked_mul(e12, o.e22)),
          checked_add(checked_mul(e21, o.e11), checked_mul(e22, o.e21)),
          checked_add(checked_mul(e21, o.e12), checked_mul(e22, o.e22))};
}

IntVec2 IntMatrix2::operator*(IntVec2 v) const {
  return {checked_add(checked_mul(e11, v.x), checked_mul(e12, v.y)),
          checked_add(checked_mul(e21, v.x), checked_mul(e22, v.y))};
}

IntMatrix2 IntMatrix2::unimodular_inverse() const {
  const Int d = det();
  if (d != 1 && d != -1) {
    throw IntMatError(IntMatError::Kind::singular, "matrix is not unimodular");
  }
  IntMatrix2 adj = adjugate();
  return {adj.e11 * d, adj.e12 * d, adj.e21 * d, adj.e22 * d};
}

Mat2 IntMatrix2::to_real() const {
  return {static_cast<double>(e11), static_cast<double>(e12), static_cast<double>(e21),
          static_cast<double>(e22)};
}

Mat2 IntMatrix2::real_inverse() const {
  const double d = static_cast<double>(det());
  return {static_cast<double>(e22) / d, -static_cast<double>(e12) / d,
          -static_cast<double>(e21) / d, static_cast<double>(e11) / d};
}

void validate_linear_part(const IntMatrix2& m) {
  for (Int e : m.row_major()) {
    if (e > kMaxEntry || e < -kMaxEntry) {
      throw IntMatError(IntMatError::Kind::out_of_range,
                        "matrix entry exceeds 1e6 in absolute value");
    }
  }
  if (m.det() == 0) throw IntMatError(IntMatError::Kind::singular, "matrix is singular");
}

Int gcd_of_entries(const IntMatrix2& m) {
  return std::gcd(std::gcd(m.e11, m.e12), std::gcd(m.e21, m.e22));
}

SmithDecomposition smith_normal_form(const IntMatrix2& e) {
  validate_linear_part(e);
  Reducer red{{{{e.e11, e.e12}, {e.e21, e.e22}}}};
  auto& a = red.a;

  for (;;) {
    if (a[0][1] == 0 && a[1][0] == 0) {
      if (a[0][0] != 0 && a[1][1] % a[0][0] == 0) break;
      // Not yet tau1 | tau2: fold row 1 into row 0 and reduce again.
      red.add_row(0, 1, 1);
      continue;
    }
    // Bring the smallest nonzero entry to the pivot position.
    int bi = 0, bj = 0;
    Int best = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const Int v = std::llabs(a[i][j]);
        if (v != 0 && (best == 0 || v < best)) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == 1) red.swap_rows();
    if (bj == 1) red.swap_cols();
    if (a[1][0] != 0) red.add_row(1, 0, -floor_div(a[1][0], a[0][0]));
    if (a[0][1] != 0) red.add_col(1, 0, -floor_div(a[0][1], a[0][0]));
  }
  if (a[0][0] < 0) red.negate_row(0);
  if (a[1][1] < 0) red.negate_row(1);

  SmithDecomposition out;
  out.left = red.l;
  out.right = red.r;
  out.tau1 = a[0][0];
  out.tau2 = a[1][1];
  return out;
}

CosetIndex::CosetIndex(const IntMatrix2& e)
    : e_(e), snf_(smith_normal_form(e)), left_inverse_(snf_.left.unimodular_inverse()) {
  reps_.reserve(static_cast<std::size_t>(snf_.tau1 * snf_.tau2));
  for (Int i = 0; i < snf_.tau1; ++i) {
    for (Int j = 0; j < snf_.tau2; ++j) {
      reps_.push_back(snf_.left * IntVec2{i, j});
    }
  }
}

std::size_t CosetIndex::index_of(IntVec2 z) const {
  const IntVec2 c = left_inverse_ * z;
  const Int i = mod_pos(c.x, snf_.tau1);
  const Int j = mod_pos(c.y, snf_.tau2);
  return static_cast<std::size_t>(i * snf_.tau2 + j);
}

IntVec2 CosetIndex::solve(IntVec2 z) const {
  // E u = z  <=>  D (R u) = L^{-1} z.
  const IntVec2 c = left_inverse_ * z;
  if (c.x % snf_.tau1 != 0 || c.y % snf_.tau2 != 0) {
    throw std::logic_error("vector is not in the image lattice");
  }
  const IntVec2 ru{c.x / snf_.tau1, c.y / snf_.tau2};
  return snf_.right.unimodular_inverse() * ru;
}

std::vector<IntVec2> coset_representatives(const IntMatrix2& e) {
  return CosetIndex(e).representatives();
}

bool has_normal_lattice(const IntMatrix2& g, Int tau1, Int tau2) {
  // g^{-1} e_j = adj(g) e_j / det. Both lattices have covolume 1/|det|, so
  // inclusion of the generators is enough.
  const Int d = g.det();
  if (d == 0 || tau1 * tau2 != (d < 0 ? -d : d)) return false;
  const IntMatrix2 adj = g.adjugate();
  for (Int col = 0; col < 2; ++col) {
    const Int top = col == 0 ? adj.e11 : adj.e12;
    const Int bottom = col == 0 ? adj.e21 : adj.e22;
    if (checked_mul(top, tau2) % d != 0) return false;
    if (checked_mul(bottom, tau1) % d != 0) return false;
  }
  return true;
}

NormalPosition normalize_position(const IntMatrix2& e) {
  const SmithDecomposition snf = smith_normal_form(e);
  if (e.is_homothety()) {
    throw IntMatError(IntMatError::Kind::homothety,
                      "homothety: every direction is an eigenvector");
  }
  const IntMatrix2 p = snf.right.unimodular_inverse() * IntMatrix2::swap();
  const IntMatrix2 g = p.unimodular_inverse() * e * p;

  NormalPosition out{p, g, 0, snf.tau1, snf.tau2};
  if (!fixes_vertical(g)) return out;

  // A non-homothety has at most two eigenlines, so some k e1 + e2 works.
  for (Int step = 1; step <= 4; ++step) {
    for (Int k : {step, -step}) {
      const IntMatrix2 s{1, k, 0, 1};
      const IntMatrix2 gk = s.unimodular_inverse() * g * s;
      if (!fixes_vertical(gk)) {
        out.conjugator = p * s;
        out.normal = gk;
        out.shear = k;
        return out;
      }
    }
  }
  throw std::logic_error("normalize_position: no shear moves (0,1) off an eigenvector");
}

}  // namespace nuh
