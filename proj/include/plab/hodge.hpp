#pragma once

// Fujiki relations (top and polarized), hafnians, and the AM-GM rigidity of pairs of
// positive-definite Hermitian forms.

#include "plab/lattice.hpp"
#include "plab/types.hpp"

#include <Eigen/Cholesky>
#include <numeric>
#include <type_traits>
#include <vector>

namespace plab {

struct FujikiStructure {
  QuadLattice lattice;
  int n = 1;  // half the complex dimension
  Rational c = 1;
  Rational K = 1;

  FujikiStructure(QuadLattice l, int half_dim, Rational top = 1, Rational polarized = 1);
};

template <typename Scalar>
Scalar to_scalar(const Rational& r) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return r;
  } else if constexpr (std::is_same_v<Scalar, double>) {
    return r.convert_to<double>();
  } else {
    return rational_to_real<Scalar>(r);
  }
}

template <typename Scalar>
Scalar form_value(const QuadLattice& l, const Vector<Scalar>& u, const Vector<Scalar>& v) {
  if (u.size() != l.rank() || v.size() != l.rank()) throw PreconditionError("vector has the wrong dimension");
  Scalar s = 0;
  for (Eigen::Index i = 0; i < l.rank(); ++i)
    for (Eigen::Index j = 0; j < l.rank(); ++j)
      if (l.gram()(i, j) != 0) s += u(i) * to_scalar<Scalar>(Rational(l.gram()(i, j))) * v(j);
  return s;
}

// c q(eta, eta)^n
template <typename Scalar>
Scalar fujiki_top(const FujikiStructure& F, const Vector<Scalar>& eta) {
  const Scalar q = form_value(F.lattice, eta, eta);
  Scalar out = to_scalar<Scalar>(F.c);
  for (int k = 0; k < F.n; ++k) out *= q;
  return out;
}

constexpr int kMaxBruteforceSize = 8;

// sum over sigma in S_{2n} of prod_i Q(sigma(2i-1), sigma(2i)).
template <typename Scalar>
Scalar paired_permutation_sum(const Matrix<Scalar>& Q) {
  const int m = static_cast<int>(Q.rows());
  if (Q.cols() != m || m % 2 != 0) throw PreconditionError("need a square matrix of even size");
  if (m > kMaxBruteforceSize) throw PreconditionError("too large for brute-force enumeration (2n <= 8)");
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Scalar total = 0;
  do {
    Scalar p = 1;
    for (int i = 0; i < m; i += 2) p *= Q(perm[i], perm[i + 1]);
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// K sum_{sigma} prod q(eta_sigma(2i-1), eta_sigma(2i)) over all (2n)! permutations.
template <typename Scalar>
Scalar fujiki_polarized_bruteforce(const FujikiStructure& F, const std::vector<Vector<Scalar>>& etas) {
  const int m = static_cast<int>(etas.size());
  if (m != 2 * F.n) throw PreconditionError("need exactly 2n vectors");
  if (m > kMaxBruteforceSize) throw PreconditionError("too large for brute-force enumeration (2n <= 8)");
  Matrix<Scalar> Q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Q(i, j) = form_value(F.lattice, etas[i], etas[j]);
  return to_scalar<Scalar>(F.K) * paired_permutation_sum(Q);
}

constexpr int kMaxHafnianSize = 20;

// Sum over perfect matchings, by recursion on the lowest unmatched index with a table
// over subsets: O(2^m m).
template <typename Scalar>
Scalar hafnian(const Matrix<Scalar>& A) {
  const int m = static_cast<int>(A.rows());
  if (A.cols() != m) throw PreconditionError("hafnian needs a square matrix");
  if (m % 2 != 0) throw PreconditionError("hafnian needs even dimension");
  if (m > kMaxHafnianSize) throw PreconditionError("matrix too large for the subset table");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      if (A(i, j) != A(j, i)) throw PreconditionError("hafnian needs a symmetric matrix");
  if (m == 0) return Scalar(1);
  const size_t full = (size_t{1} << m) - 1;
  std::vector<Scalar> table(full + 1, Scalar(0));
  table[0] = 1;
  for (size_t mask = 1; mask <= full; ++mask) {
    if (__builtin_popcountll(mask) % 2 != 0) continue;
    const int i = __builtin_ctzll(mask);
    const size_t rest = mask & ~(size_t{1} << i);
    Scalar s = 0;
    for (int j = i + 1; j < m; ++j)
      if (rest & (size_t{1} << j)) s += A(i, j) * table[rest & ~(size_t{1} << j)];
    table[mask] = s;
  }
  return table[full];
}

class HermitianForm {
 public:
  using Mat = Eigen::MatrixXcd;
  // Throws PreconditionError unless Hermitian and positive-definite (Cholesky pivots > 0).
  explicit HermitianForm(Mat entries);

  Eigen::Index n() const { return entries_.rows(); }
  const Mat& entries() const { return entries_; }
  const Eigen::LLT<Mat>& cholesky() const { return llt_; }
  // log det from the Cholesky pivots.
  double log_det() const;
  double max_abs() const;

 private:
  Mat entries_;
  Eigen::LLT<Mat> llt_;
};

struct MixedRatios {
  double mean = 0;       // Tr(H1 H2^-1) / n
  double detratio = 0;   // det(H1 H2^-1)
};

MixedRatios amgm_mixed_ratios(const HermitianForm& h1, const HermitianForm& h2);

enum class RigidityVerdict { Equal, PremiseViolated, Counterexample };
std::string to_string(RigidityVerdict v);

struct RigidityReport {
  RigidityVerdict verdict = RigidityVerdict::PremiseViolated;
  MixedRatios ratios;
  double distance = 0;  // max |H1 - H2| entry
  double bound = 0;     // admissible distance under the premise; 0 when not applicable
};

// Admissible max-entry distance when both ratios are within tol of 1. With alpha_i = 1 + u_i
// the eigenvalues of H2^-1 H1, sum(u_i - log(1 + u_i)) = n (mean - 1) - log det <= delta,
// every term is nonnegative, so |u_i| <= u* where u* - log(1 + u*) = delta; then
// |H1 - H2|_max <= |H2|_2 u* <= n |H2|_max u*. For small tol, u* ~ sqrt(2 (n + 1) tol).
double rigidity_bound(Eigen::Index n, double h2_max, double tol);

RigidityReport amgm_rigidity_check(const HermitianForm& h1, const HermitianForm& h2, double tol);

// Arithmetic and geometric means of positive numbers.
struct MeanPair {
  double arithmetic = 0;
  double geometric = 0;
};
MeanPair arithmetic_geometric(const std::vector<double>& alpha);

}  // namespace plab
