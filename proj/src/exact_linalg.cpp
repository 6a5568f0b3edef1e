#include "plab/exact_linalg.hpp"

namespace plab {

Diagonalization diagonalize_symmetric(const RatMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionError("symmetric matrix must be square");
  if (a != a.transpose()) throw PreconditionError("matrix is not symmetric");
  const auto n = a.rows();
  RatMatrix s = a;
  RatMatrix p = RatMatrix::Identity(n, n);

  for (Eigen::Index k = 0; k < n; ++k) {
    if (s(k, k) == 0) {
      Eigen::Index swap_with = -1;
      for (Eigen::Index j = k + 1; j < n; ++j)
        if (s(j, j) != 0) {
          swap_with = j;
          break;
        }
      if (swap_with >= 0) {
        s.row(k).swap(s.row(swap_with));
        s.col(k).swap(s.col(swap_with));
        p.col(k).swap(p.col(swap_with));
      } else {
        Eigen::Index partner = -1;
        for (Eigen::Index j = k + 1; j < n; ++j)
          if (s(k, j) != 0) {
            partner = j;
            break;
          }
        if (partner < 0) continue;  // row k is zero: radical direction
        // e_k <- e_k + e_partner makes the pivot 2 s(k, partner).
        s.col(k) += s.col(partner);
        s.row(k) += s.row(partner);
        p.col(k) += p.col(partner);
      }
    }
    const Rational pivot = s(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (s(i, k) == 0) continue;
      const Rational f = s(i, k) / pivot;
      s.col(i) -= f * s.col(k);
      s.row(i) -= f * s.row(k);
      p.col(i) -= f * p.col(k);
    }
  }

  Diagonalization out;
  out.transform = std::move(p);
  out.diagonal = s.diagonal();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (out.diagonal(k) > 0)
      ++out.inertia.positive;
    else if (out.diagonal(k) < 0)
      ++out.inertia.negative;
    else
      ++out.inertia.zero;
  }
  return out;
}

Integer gcd_of(const IntVector& v) {
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = mp::gcd(g, mp::abs(v(i)));
  return g;
}

bool is_zero(const IntVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

IntVector make_primitive(const IntVector& v) {
  const Integer g = gcd_of(v);
  if (g == 0 || g == 1) return v;
  IntVector out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) /= g;
  return out;
}

IntVector primitive_integer_multiple(const RatVector& v) {
  Integer l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) l = mp::lcm(l, Integer(mp::denominator(v(i))));
  IntVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = Integer(mp::numerator(v(i))) * (l / Integer(mp::denominator(v(i))));
  return make_primitive(out);
}

IntVector normalize_sign(const IntVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) > 0) return v;
    if (v(i) < 0) return IntVector(-v);
  }
  return v;
}

Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("determinant of non-square matrix");
  const auto n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1;
  Integer prev = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index swap_with = -1;
      for (Eigen::Index r = k + 1; r < n; ++r)
        if (a(r, k) != 0) {
          swap_with = r;
          break;
        }
      if (swap_with < 0) return 0;
      a.row(k).swap(a.row(swap_with));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

namespace {

// Extended Euclid: returns g = s a + t b with g >= 0.
Integer extended_gcd(const Integer& a, const Integer& b, Integer& s, Integer& t) {
  Integer old_r = a, r = b, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    const Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
    tmp = old_t - q * cur_t;
    old_t = cur_t;
    cur_t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  s = old_s;
  t = old_t;
  return old_r;
}

}  // namespace

IntMatrix integer_kernel(const IntMatrix& m) {
  const auto rows = m.rows();
  const auto n = m.cols();
  IntMatrix w(rows + n, n);
  w.topRows(rows) = m;
  w.bottomRows(n) = identity_int(n);

  Eigen::Index col = 0;
  for (Eigen::Index r = 0; r < rows && col < n; ++r) {
    for (Eigen::Index c = col + 1; c < n; ++c) {
      if (w(r, c) == 0) continue;
      if (w(r, col) == 0) {
        w.col(col).swap(w.col(c));
        continue;
      }
      Integer s, t;
      const Integer a = w(r, col), b = w(r, c);
      const Integer g = extended_gcd(a, b, s, t);
      const IntVector left = w.col(col), right = w.col(c);
      w.col(col) = s * left + t * right;
      w.col(c) = (-b / g) * left + (a / g) * right;
    }
    if (w(r, col) != 0) ++col;
  }
  return w.bottomRows(n).rightCols(n - col);
}

IntMatrix hermite_normal_form(const IntMatrix& rows_in) {
  IntMatrix a = rows_in;
  const auto m = a.rows();
  const auto n = a.cols();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < m; ++col) {
    // Euclid on column `col` among rows >= row.
    while (true) {
      Eigen::Index best = -1;
      for (Eigen::Index r = row; r < m; ++r)
        if (a(r, col) != 0 && (best < 0 || mp::abs(a(r, col)) < mp::abs(a(best, col)))) best = r;
      if (best < 0) break;
      a.row(row).swap(a.row(best));
      bool done = true;
      for (Eigen::Index r = row + 1; r < m; ++r) {
        if (a(r, col) == 0) continue;
        const Integer q = a(r, col) / a(row, col);
        a.row(r) -= q * a.row(row);
        if (a(r, col) != 0) done = false;
      }
      if (done) break;
    }
    if (a(row, col) == 0) continue;
    if (a(row, col) < 0) a.row(row) = -a.row(row);
    for (Eigen::Index r = 0; r < row; ++r) {
      Integer q = a(r, col) / a(row, col);
      if (a(r, col) - q * a(row, col) < 0) q -= 1;
      a.row(r) -= q * a.row(row);
    }
    ++row;
  }
  return a.topRows(row);
}

IntMatrix identity_int(Eigen::Index n) {
  IntMatrix id = IntMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) id(i, i) = 1;
  return id;
}

}  // namespace plab
