#include "plab/isometry.hpp"

#include <numeric>
#include <sstream>

namespace plab {

bool verify_isometry(const QuadLattice& lattice, const IntMatrix& m) {
  if (m.rows() != lattice.rank() || m.cols() != lattice.rank()) return false;
  return IntMatrix(m.transpose() * lattice.gram() * m) == lattice.gram();
}

LatticeIsometry::LatticeIsometry(QuadLattice lattice, IntMatrix matrix)
    : lattice_(std::move(lattice)), matrix_(std::move(matrix)) {
  if (!verify_isometry(lattice_, matrix_)) throw PreconditionError("matrix does not preserve the Gram matrix");
}

Integer LatticeIsometry::determinant() const { return plab::determinant(matrix_); }

LatticeIsometry operator*(const LatticeIsometry& a, const LatticeIsometry& b) {
  if (a.lattice_.gram() != b.lattice_.gram()) throw PreconditionError("composing isometries of different lattices");
  return LatticeIsometry(a.lattice_, a.matrix_ * b.matrix_);
}

LatticeIsometry identity_isometry(const QuadLattice& lattice) {
  return LatticeIsometry(lattice, identity_int(lattice.rank()));
}

LatticeIsometry inverse(const LatticeIsometry& g) {
  // g^{-1} = G^{-1} g^T G
  const RatMatrix gram = to_rational(g.lattice().gram());
  const RatMatrix inv = inverse_exact(gram) * to_rational(IntMatrix(g.matrix().transpose())) * gram;
  IntMatrix out(inv.rows(), inv.cols());
  for (Eigen::Index i = 0; i < inv.rows(); ++i)
    for (Eigen::Index j = 0; j < inv.cols(); ++j) {
      if (mp::denominator(inv(i, j)) != 1) throw InternalError("inverse of an integral isometry is not integral");
      out(i, j) = Integer(mp::numerator(inv(i, j)));
    }
  return LatticeIsometry(g.lattice(), out);
}

IntMatrix matrix_power(const IntMatrix& m, const Integer& k) {
  if (k < 0) throw PreconditionError("negative matrix power");
  IntMatrix result = identity_int(m.rows());
  IntMatrix base = m;
  Integer e = k;
  while (e > 0) {
    if (mp::bit_test(e, 0)) result = (result * base).eval();
    e >>= 1;
    if (e > 0) base = (base * base).eval();
  }
  return result;
}

LatticeIsometry power(const LatticeIsometry& g, long k) {
  if (k < 0) return power(inverse(g), -k);
  return LatticeIsometry(g.lattice(), matrix_power(g.matrix(), Integer(k)));
}

bool is_quasi_unipotent(const LatticeIsometry& g) {
  return split_cyclotomic(characteristic_polynomial(g.matrix())).cofactor.degree() == 0;
}

bool is_semisimple(const LatticeIsometry& g) {
  // Minimal polynomial squarefree <=> the radical of the characteristic polynomial kills g.
  const auto rad = squarefree_part(characteristic_polynomial(g.matrix()));
  const RatMatrix value = rad.evaluate_matrix(to_rational(g.matrix()));
  return value.isZero();
}

const char* to_string(IsometryTag tag) {
  switch (tag) {
    case IsometryTag::Elliptic:
      return "Elliptic";
    case IsometryTag::Parabolic:
      return "Parabolic";
    case IsometryTag::Loxodromic:
      return "Loxodromic";
  }
  return "?";
}

namespace {

long lcm_of(const std::vector<long>& values) {
  long l = 1;
  for (long v : values) l = std::lcm(l, v);
  return l;
}

// Intervals (lo, hi] each containing exactly one real root of the squarefree polynomial.
std::vector<std::pair<Rational, Rational>> isolate_roots(const std::vector<RatPolynomial>& chain, Rational lo,
                                                         Rational hi) {
  std::vector<std::pair<Rational, Rational>> out;
  std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const int count = count_real_roots(chain, a, b);
    if (count == 0) continue;
    if (count == 1) {
      out.emplace_back(a, b);
      continue;
    }
    const Rational mid = (a + b) / 2;
    stack.emplace_back(a, mid);
    stack.emplace_back(mid, b);
  }
  return out;
}

Real256 root_in(const RatPolynomial& p, const std::pair<Rational, Rational>& iv) {
  // A root sitting exactly on the right endpoint is returned directly.
  if (p.evaluate(iv.second) == 0) return rational_to_real<Real256>(iv.second);
  return refine_root<Real256>(p, iv.first, iv.second, 256);
}

// Null vector of a numerically rank-deficient square matrix by full-pivot elimination.
template <typename Real>
Vector<Real> null_vector(Matrix<Real> a) {
  const auto n = a.rows();
  std::vector<Eigen::Index> col_perm(static_cast<size_t>(n));
  std::iota(col_perm.begin(), col_perm.end(), 0);
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    Eigen::Index pr = k, pc = k;
    Real best = 0;
    for (Eigen::Index i = k; i < n; ++i)
      for (Eigen::Index j = k; j < n; ++j)
        if (mp::abs(a(i, j)) > best) {
          best = mp::abs(a(i, j));
          pr = i;
          pc = j;
        }
    a.row(k).swap(a.row(pr));
    a.col(k).swap(a.col(pc));
    std::swap(col_perm[static_cast<size_t>(k)], col_perm[static_cast<size_t>(pc)]);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Real f = a(i, k) / a(k, k);
      for (Eigen::Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  // The last pivot is ~0: set the last permuted variable to 1 and back-substitute.
  Vector<Real> y = Vector<Real>::Zero(n);
  y(n - 1) = 1;
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    Real s = 0;
    for (Eigen::Index j = k + 1; j < n; ++j) s += a(k, j) * y(j);
    y(k) = -s / a(k, k);
  }
  Vector<Real> x(n);
  for (Eigen::Index k = 0; k < n; ++k) x(col_perm[static_cast<size_t>(k)]) = y(k);
  return x;
}

Eigen::VectorXd eigen_direction(const IntMatrix& m, const Real256& lambda) {
  const auto n = m.rows();
  Matrix<Real256> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = integer_to_real<Real256>(m(i, j));
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) -= lambda;
  Vector<Real256> v = null_vector(a);
  Real256 sup = 0;
  for (Eigen::Index i = 0; i < n; ++i) sup = max_of(sup, mp::abs(v(i)));
  v /= sup;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mp::abs(v(i)) < Real256(1e-40)) continue;
    if (v(i) < 0) v = -v;
    break;
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = v(i).convert_to<double>();
  return out;
}

LoxodromicData loxodromic_payload(const IntMatrix& m, const RatPolynomial& cofactor) {
  const auto sqf = squarefree_part(cofactor);
  const auto chain = sturm_chain(sqf);
  const Rational bound = root_bound(sqf);
  // Real roots with |r| > 1 and |r| < 1. The cofactor has no roots at +-1 (those are
  // cyclotomic), so the half-open intervals below are safe.
  std::vector<std::pair<Rational, Rational>> outer, inner;
  for (auto iv : isolate_roots(chain, Rational(1), bound)) outer.push_back(iv);
  for (auto iv : isolate_roots(chain, -bound, Rational(-1))) outer.push_back(iv);
  for (auto iv : isolate_roots(chain, Rational(-1), Rational(1))) inner.push_back(iv);
  if (outer.size() != 1 || inner.size() != 1) {
    std::ostringstream os;
    os << "loxodromic spectrum has " << outer.size() << " real root(s) outside and " << inner.size()
       << " inside the unit circle";
    throw InternalError(os.str());
  }
  LoxodromicData out;
  out.lambda = root_in(sqf, outer.front());
  out.lambda_inverse = root_in(sqf, inner.front());
  out.expanding = eigen_direction(m, out.lambda);
  out.contracting = eigen_direction(m, out.lambda_inverse);
  return out;
}

ParabolicData parabolic_payload(const LatticeIsometry& g, long unipotent_power) {
  const auto& gram = g.lattice().gram();
  const IntMatrix h = matrix_power(g.matrix(), Integer(unipotent_power));
  const IntMatrix fixed = integer_kernel(IntMatrix(h - identity_int(h.rows())));
  // The fixed space is negative semidefinite; its radical is the isotropic fixed line.
  const IntMatrix restricted = fixed.transpose() * gram * fixed;
  const RatMatrix radical = kernel_basis(to_rational(restricted));
  if (radical.cols() != 1) {
    std::ostringstream os;
    os << "parabolic fixed space has a radical of dimension " << radical.cols();
    throw InternalError(os.str());
  }
  const RatVector v = to_rational(fixed) * radical.col(0);
  ParabolicData out;
  out.fixed_vector = normalize_sign(primitive_integer_multiple(v));
  out.unipotent_power = unipotent_power;
  return out;
}

}  // namespace

IsometryClass classify(const LatticeIsometry& g) {
  const auto& lattice = g.lattice();
  if (!lattice.is_hyperbolic()) throw PreconditionError("classification needs a lattice of signature (1, n), n >= 1");

  IsometryClass out;
  out.characteristic = characteristic_polynomial(g.matrix());
  const auto split = split_cyclotomic(out.characteristic);
  out.cyclotomic_orders = split.orders;
  out.orientation_preserving = g.determinant() == 1;
  const IntVector& w = *lattice.positive_vector();
  out.time_preserving = bbf_eval(lattice, w, IntVector(g.matrix() * w)) > 0;

  if (split.cofactor.degree() > 0) {
    out.payload = loxodromic_payload(g.matrix(), split.cofactor);
    return out;
  }
  const long order = lcm_of(split.orders);
  if (is_semisimple(g)) {
    if (matrix_power(g.matrix(), Integer(order)) != identity_int(lattice.rank()))
      throw InternalError("semisimple quasi-unipotent isometry fails g^order = 1");
    out.payload = EllipticData{order};
  } else {
    out.payload = parabolic_payload(g, order);
  }
  return out;
}

LatticeIsometry eichler_transvection(const QuadLattice& lattice, const IntVector& e, const IntVector& v) {
  if (e.size() != lattice.rank() || v.size() != lattice.rank()) throw PreconditionError("vector length mismatch");
  if (is_zero(e)) throw PreconditionError("transvection needs a nonzero isotropic vector e");
  if (bbf_square(lattice, e) != 0) throw PreconditionError("e is not isotropic");
  if (bbf_eval(lattice, e, v) != 0) throw PreconditionError("v is not orthogonal to e");
  const auto& gram = lattice.gram();
  const IntVector ge = gram * e;
  const IntVector gv = gram * v;
  const Integer qvv = bbf_square(lattice, v);
  const auto n = lattice.rank();
  IntMatrix m = identity_int(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // column j is t(b_j)
      const Integer twice = qvv * e(i) * ge(j);
      if (twice % 2 != 0) throw PreconditionError("transvection is not integral: q(v,v) q(b,e) e is odd");
      m(i, j) += e(i) * gv(j) - v(i) * ge(j) - twice / 2;
    }
  return LatticeIsometry(lattice, m);
}

LimitResult limit_nef_class(const LatticeIsometry& g, const Eigen::VectorXd& w, const LimitOptions& options) {
  const auto& lattice = g.lattice();
  if (w.size() != lattice.rank()) throw PreconditionError("start class has wrong length");
  const auto cls = classify(g);
  if (cls.tag() != IsometryTag::Parabolic) throw PreconditionError("limit_nef_class needs a parabolic isometry");
  const Eigen::MatrixXd gram = to_double(lattice.gram());
  const double qww = w.dot(gram * w);
  if (!(qww > 1e-12 * w.squaredNorm() * std::max(1.0, gram.cwiseAbs().maxCoeff())))
    throw PreconditionError("start class is not in the open positive cone");

  const auto n = lattice.rank();
  Vector<Real256> wr(n);
  for (Eigen::Index i = 0; i < n; ++i) wr(i) = Real256(w(i));
  Matrix<Real256> gram_r(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gram_r(i, j) = integer_to_real<Real256>(lattice.gram()(i, j));

  auto direction_of = [&](const IntMatrix& m) {
    Vector<Real256> v = Vector<Real256>::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) v(i) += integer_to_real<Real256>(m(i, j)) * wr(j);
    Real256 sup = 0;
    for (Eigen::Index i = 0; i < n; ++i) sup = max_of(sup, mp::abs(v(i)));
    v /= sup;
    if (v.dot(gram_r * wr) < 0) v = -v;
    return v;
  };

  // Powers of the unipotent part converge without rotating.
  IntMatrix step = matrix_power(g.matrix(), Integer(cls.parabolic().unipotent_power));
  Integer exponent = cls.parabolic().unipotent_power;
  Vector<Real256> previous = direction_of(step);
  LimitResult out;
  for (int k = 1; k <= options.max_doublings; ++k) {
    step = (step * step).eval();
    exponent *= 2;
    Vector<Real256> current = direction_of(step);
    Real256 change = 0;
    for (Eigen::Index i = 0; i < n; ++i) change = max_of(change, mp::abs(current(i) - previous(i)));
    previous = std::move(current);
    if (change < Real256(options.tolerance)) {
      out.doublings = k;
      out.exponent = exponent;
      out.direction.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) out.direction(i) = previous(i).convert_to<double>();
      return out;
    }
  }
  throw NumericalContractError("limit_nef_class did not converge within the doubling cap");
}

}  // namespace plab
