#pragma once

// Exact linear algebra over the integers and rationals.

#include "plab/types.hpp"

#include <utility>
#include <vector>

namespace plab {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

struct Diagonalization {
  Inertia inertia;
  RatMatrix transform;  // columns P with P^T A P diagonal
  RatVector diagonal;
};

// Congruence diagonalization with symmetric pivoting; Sylvester's law gives the inertia.
Diagonalization diagonalize_symmetric(const RatMatrix& a);

inline Inertia inertia(const RatMatrix& a) { return diagonalize_symmetric(a).inertia; }

Integer gcd_of(const IntVector& v);
bool is_zero(const IntVector& v);
// Divides out the content; the zero vector is returned unchanged.
IntVector make_primitive(const IntVector& v);
// Primitive integer multiple of a rational vector.
IntVector primitive_integer_multiple(const RatVector& v);
// Flips sign so the first nonzero coordinate is positive.
IntVector normalize_sign(const IntVector& v);

Integer determinant(const IntMatrix& m);  // Bareiss fraction-free elimination

// Columns form a basis of {v in Z^n : M v = 0} (saturated).
IntMatrix integer_kernel(const IntMatrix& m);

// Row Hermite normal form of the lattice spanned by the rows; zero rows dropped.
IntMatrix hermite_normal_form(const IntMatrix& rows);

IntMatrix identity_int(Eigen::Index n);

template <typename Field>
struct Echelon {
  Matrix<Field> reduced;
  std::vector<Eigen::Index> pivots;
};

// Reduced row echelon form; exact for Rational.
template <typename Field>
Echelon<Field> reduced_row_echelon(Matrix<Field> m) {
  Echelon<Field> out;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r)
      if (m(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    m.row(row).swap(m.row(pivot));
    const Field inv = Field(1) / m(row, col);
    for (Eigen::Index c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Field f = m(r, col);
      for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

template <typename Field>
Eigen::Index rank(const Matrix<Field>& m) {
  return static_cast<Eigen::Index>(reduced_row_echelon(m).pivots.size());
}

// Columns span the right kernel of m.
template <typename Field>
Matrix<Field> kernel_basis(const Matrix<Field>& m) {
  const auto ech = reduced_row_echelon(m);
  std::vector<bool> is_pivot(static_cast<size_t>(m.cols()), false);
  for (auto p : ech.pivots) is_pivot[static_cast<size_t>(p)] = true;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
  Matrix<Field> basis = Matrix<Field>::Zero(m.cols(), static_cast<Eigen::Index>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    const auto f = free_cols[k];
    basis(f, static_cast<Eigen::Index>(k)) = 1;
    for (size_t r = 0; r < ech.pivots.size(); ++r)
      basis(ech.pivots[r], static_cast<Eigen::Index>(k)) = -ech.reduced(static_cast<Eigen::Index>(r), f);
  }
  return basis;
}

template <typename Field>
Matrix<Field> inverse_exact(const Matrix<Field>& m) {
  if (m.rows() != m.cols()) throw PreconditionError("inverse of non-square matrix");
  const auto n = m.rows();
  Matrix<Field> aug(n, 2 * n);
  aug.leftCols(n) = m;
  aug.rightCols(n) = Matrix<Field>::Identity(n, n);
  auto ech = reduced_row_echelon(aug);
  if (static_cast<Eigen::Index>(ech.pivots.size()) < n || ech.pivots[static_cast<size_t>(n - 1)] != n - 1)
    throw PreconditionError("singular matrix");
  return ech.reduced.rightCols(n);
}

}  // namespace plab
