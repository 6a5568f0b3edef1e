#pragma once

// LLL reduction of integer coefficient vectors under an embedding into R^m. The basis is
// kept as exact integer vectors; the embedding is recomputed from them after every update,
// so round-off never accumulates in the basis itself. Scalar is a BinFloat or Rational.

#include "plab/types.hpp"

#include <vector>

namespace plab {

template <typename Scalar, typename Embed>
std::vector<IntVector> lll_reduce(std::vector<IntVector> basis, Embed embed, const Scalar& delta) {
  const int n = static_cast<int>(basis.size());
  if (n <= 1) return basis;
  using Vec = Vector<Scalar>;
  std::vector<Vec> b(n), bstar(n);
  std::vector<Scalar> norm2(n);
  Matrix<Scalar> mu = Matrix<Scalar>::Zero(n, n);

  auto dot = [](const Vec& u, const Vec& v) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) s += u(i) * v(i);
    return s;
  };
  auto gso_row = [&](int k) {
    bstar[k] = b[k];
    for (int j = 0; j < k; ++j) {
      mu(k, j) = norm2[j] == 0 ? Scalar(0) : dot(b[k], bstar[j]) / norm2[j];
      bstar[k] -= mu(k, j) * bstar[j];
    }
    norm2[k] = dot(bstar[k], bstar[k]);
  };

  for (int i = 0; i < n; ++i) b[i] = embed(basis[i]);
  gso_row(0);
  gso_row(1);
  int k = 1;
  long guard = 0;
  while (k < n) {
    if (++guard > 1000000) throw InternalError("LLL did not terminate");
    bool changed = false;
    for (int j = k - 1; j >= 0; --j) {
      const Integer r = round_to_integer(mu(k, j));
      if (r == 0) continue;
      basis[k] -= basis[j] * r;
      const Scalar rs = Scalar(r.str());
      for (int l = 0; l < j; ++l) mu(k, l) -= rs * mu(j, l);
      mu(k, j) -= rs;
      changed = true;
    }
    if (changed) {
      b[k] = embed(basis[k]);
      gso_row(k);
    }
    if (norm2[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norm2[k - 1]) {
      ++k;
      if (k < n) gso_row(k);
    } else {
      std::swap(basis[k], basis[k - 1]);
      std::swap(b[k], b[k - 1]);
      gso_row(k - 1);
      gso_row(k);
      k = std::max(k - 1, 1);
    }
  }
  return basis;
}

}  // namespace plab
