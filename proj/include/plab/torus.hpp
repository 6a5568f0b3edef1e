#pragma once

// Translations on R^n / Z^n: orbits, orbit closures as rational subspaces, equidistribution
// diagnostics and scans along polynomial families.

#include "plab/exact_linalg.hpp"
#include "plab/lll.hpp"
#include "plab/surd.hpp"
#include "plab/types.hpp"

#include <complex>
#include <limits>
#include <optional>
#include <vector>

namespace plab {

template <typename Real>
Real reduce_mod1(const Real& v) {
  Real r = v - mp::floor(v);
  if (r >= 1) r -= 1;  // floor rounding at the top end
  if (r < 0) r = 0;
  return r;
}

template <typename Real>
class TranslationVector {
 public:
  explicit TranslationVector(std::vector<Real> coords) : coords_(std::move(coords)) {
    for (auto& c : coords_) c = reduce_mod1(c);
  }
  // Keeps the exact value alongside, so the exact hull is available.
  static TranslationVector from_exact(const std::vector<SurdSum>& values) {
    std::vector<SurdSum> reduced;
    std::vector<Real> coords;
    for (const auto& v : values) {
      reduced.push_back(v.fractional_part());
      coords.push_back(reduced.back().template to_real<Real>());
    }
    TranslationVector out(std::move(coords));
    out.exact_ = std::move(reduced);
    return out;
  }

  size_t size() const { return coords_.size(); }
  const std::vector<Real>& coords() const { return coords_; }
  const Real& operator[](size_t i) const { return coords_[i]; }
  const std::optional<std::vector<SurdSum>>& exact() const { return exact_; }

 private:
  std::vector<Real> coords_;
  std::optional<std::vector<SurdSum>> exact_;
};

template <typename Real>
using TorusPoint = std::vector<Real>;

// Calls fn(k, point) with point = start + k x mod Z^n for k = 1..N.
template <typename Real, typename Fn>
void for_each_orbit_point(const TranslationVector<Real>& x, TorusPoint<Real> start, long N, Fn fn) {
  if (N < 1) throw PreconditionError("orbit length must be at least 1");
  if (start.empty()) start.assign(x.size(), Real(0));
  if (start.size() != x.size()) throw PreconditionError("start point has the wrong dimension");
  for (auto& s : start) s = reduce_mod1(s);
  for (long k = 1; k <= N; ++k) {
    for (size_t i = 0; i < start.size(); ++i) {
      start[i] += x[i];
      if (start[i] >= 1) start[i] -= 1;
    }
    fn(k, static_cast<const TorusPoint<Real>&>(start));
  }
}

template <typename Real>
std::vector<TorusPoint<Real>> iterate(const TranslationVector<Real>& x, const TorusPoint<Real>& start, long N) {
  std::vector<TorusPoint<Real>> out;
  out.reserve(static_cast<size_t>(N));
  for_each_orbit_point(x, start, N, [&](long, const TorusPoint<Real>& p) { out.push_back(p); });
  return out;
}

struct HullOptions {
  double tol = 1e-24;
  Integer height_bound = 1000000;
};

struct RationalSubspace {
  int ambient_dim = 0;
  int dim = 0;
  // Rows k with k . (x_1..x_n, 1) = 0, on the reduced representative.
  std::vector<IntVector> relations;
  // Columns span the tangent space of the orbit closure.
  RatMatrix subspace_basis;
  double tol = 0;
  Integer height_bound = 0;
  bool exact = false;

  bool dense() const { return dim == ambient_dim; }
};

// Integer points of the rational span of the rows (a saturated basis, as rows).
std::vector<IntVector> saturate(const std::vector<IntVector>& rows, Eigen::Index width);
// LLL-reduced, sign-normalized and sorted: the canonical form used in reports.
std::vector<IntVector> canonical_relations(const std::vector<IntVector>& rows);
RationalSubspace assemble_subspace(int n, std::vector<IntVector> relations);

// Smallest tolerance accepted at a given mantissa width.
double minimum_tolerance(int bits, const Integer& height_bound, int n);

template <typename Real>
RationalSubspace rational_hull(const TranslationVector<Real>& x, const HullOptions& options = {}) {
  if (!(options.tol > 0)) throw PreconditionError("tol must be positive");
  if (options.height_bound < 1) throw PreconditionError("height_bound must be at least 1");
  const int n = static_cast<int>(x.size());
  if (n < 1) throw PreconditionError("empty translation vector");
  const int bits = std::numeric_limits<Real>::digits;
  if (options.tol < minimum_tolerance(bits, options.height_bound, n))
    throw NumericalContractError("tol is below the resolution of " + std::to_string(bits) +
                                 "-bit arithmetic for this height bound");

  std::vector<Real> xt(x.coords());
  xt.push_back(Real(1));
  const Real tol(options.tol);
  const Real scale = Real(1) / tol;
  auto residue = [&](const IntVector& k) {
    Real s = 0;
    for (int i = 0; i <= n; ++i) s += integer_to_real<Real>(k(i)) * xt[i];
    return s;
  };
  auto embed = [&](const IntVector& k) {
    Vector<Real> v(n + 2);
    for (int i = 0; i <= n; ++i) v(i) = integer_to_real<Real>(k(i));
    v(n + 1) = scale * residue(k);
    return v;
  };
  std::vector<IntVector> basis;
  for (int i = 0; i <= n; ++i) {
    IntVector e = IntVector::Zero(n + 1);
    e(i) = 1;
    basis.push_back(e);
  }
  basis = lll_reduce<Real>(std::move(basis), embed, Real(99) / 100);

  std::vector<IntVector> found;
  for (const auto& k : basis) {
    Integer height = 0;
    for (int i = 0; i <= n; ++i) height = max_of<Integer>(height, mp::abs(k(i)));
    if (height <= options.height_bound && mp::abs(residue(k)) < tol) found.push_back(k);
  }
  auto out = assemble_subspace(n, canonical_relations(saturate(found, n + 1)));
  out.tol = options.tol;
  out.height_bound = options.height_bound;
  return out;
}

// Exact relations of (x, 1) over Q; no height bound applies.
RationalSubspace rational_hull_exact(const std::vector<SurdSum>& x);

template <typename Real>
int orbit_closure_dim(const TranslationVector<Real>& x, const HullOptions& options = {}) {
  return rational_hull(x, options).dim;
}

// |(1/N) sum_{j=1..N} exp(2 pi i k.(j x))|
template <typename Real>
double weyl_sum(const TranslationVector<Real>& x, const IntVector& k, long N) {
  if (N < 1) throw PreconditionError("N must be at least 1");
  if (static_cast<size_t>(k.size()) != x.size()) throw PreconditionError("frequency has the wrong dimension");
  if (is_zero(k)) throw PreconditionError("frequency must be nonzero");
  Real theta = 0;
  for (size_t i = 0; i < x.size(); ++i) theta += integer_to_real<Real>(k(static_cast<Eigen::Index>(i))) * x[i];
  theta = reduce_mod1(theta);
  const double two_pi = 2.0 * 3.14159265358979323846;
  std::complex<double> acc = 0;
  Real phase = 0;
  for (long j = 1; j <= N; ++j) {
    phase += theta;
    if (phase >= 1) phase -= 1;
    const double a = two_pi * phase.template convert_to<double>();
    acc += std::complex<double>(std::cos(a), std::sin(a));
  }
  return std::abs(acc) / static_cast<double>(N);
}

// Fraction of the 2^m-per-axis grid cells hit by the first N orbit points.
template <typename Real>
double box_coverage(const TranslationVector<Real>& x, const TorusPoint<Real>& start, long N, int m) {
  const int n = static_cast<int>(x.size());
  if (m < 1 || m > 6 || m * n > 24) throw PreconditionError("grid exponent out of range");
  const long side = 1L << m;
  std::vector<bool> hit(static_cast<size_t>(1L << (m * n)), false);
  long count = 0;
  for_each_orbit_point(x, start, N, [&](long, const TorusPoint<Real>& p) {
    size_t cell = 0;
    for (int i = n - 1; i >= 0; --i) {
      long c = static_cast<long>((p[i] * side).template convert_to<double>());
      c = std::clamp(c, 0L, side - 1);
      cell = cell * static_cast<size_t>(side) + static_cast<size_t>(c);
    }
    if (!hit[cell]) {
      hit[cell] = true;
      ++count;
    }
  });
  return static_cast<double>(count) / static_cast<double>(hit.size());
}

struct ScanPoint {
  SurdSum t;
  int dim = 0;
  std::vector<IntVector> relations;
};

struct ScanReport {
  std::vector<ScanPoint> points;
  int max_dim = 0;
  std::vector<size_t> exceptional;  // indices with dim < max_dim
};

// Exact hull dimension at every grid point of t -> (p_1(t), ..., p_n(t)).
ScanReport semicontinuity_scan(const std::vector<SurdPolynomial>& family, const std::vector<SurdSum>& grid,
                               unsigned workers = 1);

}  // namespace plab
