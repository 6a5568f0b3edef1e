#pragma once

// Dense univariate polynomials, coefficients stored low degree first.

#include "plab/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace plab {

template <typename Field>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Field> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Polynomial constant(const Field& c) { return Polynomial(std::vector<Field>{c}); }
  static Polynomial monomial(int degree, const Field& c = Field(1)) {
    std::vector<Field> v(static_cast<size_t>(degree) + 1, Field(0));
    v.back() = c;
    return Polynomial(std::move(v));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Field>& coeffs() const { return coeffs_; }
  Field coeff(int k) const {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<size_t>(k)] : Field(0);
  }
  const Field& leading() const { return coeffs_.back(); }

  Polynomial monic() const {
    if (is_zero()) return *this;
    std::vector<Field> v = coeffs_;
    const Field lead = leading();
    for (auto& a : v) a /= lead;
    return Polynomial(std::move(v));
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Field> v(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k) v[k - 1] = coeffs_[k] * Field(static_cast<long>(k));
    return Polynomial(std::move(v));
  }

  template <typename T>
  T evaluate(const T& x) const {
    T acc = T(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }

  // Horner evaluation at a square matrix.
  template <typename Scalar>
  Matrix<Scalar> evaluate_matrix(const Matrix<Scalar>& m) const {
    const auto n = m.rows();
    Matrix<Scalar> acc = Matrix<Scalar>::Zero(n, n);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = (acc * m).eval();
      for (Eigen::Index i = 0; i < n; ++i) acc(i, i) += Scalar(*it);
    }
    return acc;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Field> v(std::max(a.coeffs_.size(), b.coeffs_.size()), Field(0));
    for (size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
    for (size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
    return Polynomial(std::move(v));
  }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<Field> v = a.coeffs_;
    for (auto& x : v) x = -x;
    return Polynomial(std::move(v));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Field> v(a.coeffs_.size() + b.coeffs_.size() - 1, Field(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
      for (size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(v));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  // Euclidean division: a = q b + r with deg r < deg b.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw PreconditionError("polynomial division by zero");
    std::vector<Field> r = a.coeffs_;
    const int db = b.degree();
    if (a.degree() < db) return {Polynomial{}, a};
    std::vector<Field> q(static_cast<size_t>(a.degree() - db + 1), Field(0));
    for (int k = a.degree(); k >= db; --k) {
      const Field f = r[static_cast<size_t>(k)] / b.leading();
      q[static_cast<size_t>(k - db)] = f;
      if (f == 0) continue;
      for (int j = 0; j <= db; ++j) r[static_cast<size_t>(k - db + j)] -= f * b.coeffs_[static_cast<size_t>(j)];
    }
    r.resize(static_cast<size_t>(db));
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<Field> coeffs_;
};

using RatPolynomial = Polynomial<Rational>;

RatPolynomial polynomial_gcd(RatPolynomial a, RatPolynomial b);  // monic
RatPolynomial squarefree_part(const RatPolynomial& p);            // monic
bool divides(const RatPolynomial& d, const RatPolynomial& p);

long euler_phi(long n);
// The d-th cyclotomic polynomial.
RatPolynomial cyclotomic(long d);

// Exact characteristic polynomial det(tI - M), monic of degree n.
RatPolynomial characteristic_polynomial(const IntMatrix& m);

// Strips every cyclotomic factor Phi_d with phi(d) <= deg; returns the cyclotomic orders
// removed (with multiplicity) and the cofactor.
struct CyclotomicSplit {
  std::vector<long> orders;
  RatPolynomial cofactor;
};
CyclotomicSplit split_cyclotomic(const RatPolynomial& p);

// Sturm chain of a squarefree polynomial.
std::vector<RatPolynomial> sturm_chain(const RatPolynomial& p);
// Number of distinct real roots in the half-open interval (a, b].
int count_real_roots(const std::vector<RatPolynomial>& chain, const Rational& a, const Rational& b);
// Cauchy bound: every root has modulus strictly below the returned value.
Rational root_bound(const RatPolynomial& p);

// Refines the unique simple root of p inside (lo, hi) to the requested floating type.
template <typename Real>
Real refine_root(const RatPolynomial& p, Rational lo, Rational hi, int bits) {
  std::vector<Real> c;
  for (const auto& a : p.coeffs()) c.emplace_back(Real(mp::numerator(a)) / Real(mp::denominator(a)));
  const Polynomial<Real> pr(c);
  Real a = Real(mp::numerator(lo)) / Real(mp::denominator(lo));
  Real b = Real(mp::numerator(hi)) / Real(mp::denominator(hi));
  Real fa = pr.evaluate(a);
  for (int it = 0; it < bits + 8; ++it) {
    const Real mid = (a + b) / 2;
    const Real fm = pr.evaluate(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return (a + b) / 2;
}

std::string to_string(const RatPolynomial& p);

}  // namespace plab
