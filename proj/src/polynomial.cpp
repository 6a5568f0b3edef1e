#include "plab/polynomial.hpp"

#include <map>
#include <sstream>

namespace plab {

RatPolynomial polynomial_gcd(RatPolynomial a, RatPolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

RatPolynomial squarefree_part(const RatPolynomial& p) {
  if (p.degree() <= 0) return p.monic();
  return divmod(p, polynomial_gcd(p, p.derivative())).first.monic();
}

bool divides(const RatPolynomial& d, const RatPolynomial& p) { return divmod(p, d).second.is_zero(); }

long euler_phi(long n) {
  long result = n;
  for (long f = 2; f * f <= n; ++f) {
    if (n % f != 0) continue;
    while (n % f == 0) n /= f;
    result -= result / f;
  }
  if (n > 1) result -= result / n;
  return result;
}

RatPolynomial cyclotomic(long d) {
  if (d < 1) throw PreconditionError("cyclotomic order must be positive");
  static thread_local std::map<long, RatPolynomial> cache;
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  // x^d - 1 = prod_{e | d} Phi_e
  RatPolynomial p = RatPolynomial::monomial(static_cast<int>(d)) - RatPolynomial::constant(1);
  for (long e = 1; e < d; ++e)
    if (d % e == 0) p = divmod(p, cyclotomic(e)).first;
  cache.emplace(d, p);
  return p;
}

RatPolynomial characteristic_polynomial(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("characteristic polynomial of non-square matrix");
  const auto n = m.rows();
  // Faddeev-LeVerrier; every division by k is exact over the integers.
  std::vector<Integer> c(static_cast<size_t>(n) + 1, Integer(0));
  c[static_cast<size_t>(n)] = 1;
  IntMatrix acc = IntMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    acc = (m * acc).eval();
    for (Eigen::Index i = 0; i < n; ++i) acc(i, i) += c[static_cast<size_t>(n - k + 1)];
    const IntMatrix prod = m * acc;
    Integer trace = 0;
    for (Eigen::Index i = 0; i < n; ++i) trace += prod(i, i);
    if (trace % k != 0) throw InternalError("Faddeev-LeVerrier produced a non-integral coefficient");
    c[static_cast<size_t>(n - k)] = -trace / k;
  }
  std::vector<Rational> coeffs;
  coeffs.reserve(c.size());
  for (const auto& x : c) coeffs.emplace_back(x);
  return RatPolynomial(std::move(coeffs));
}

CyclotomicSplit split_cyclotomic(const RatPolynomial& p) {
  CyclotomicSplit out;
  out.cofactor = p.monic();
  const long deg = p.degree();
  const long max_order = 2 * deg * deg + 2;
  for (long d = 1; d <= max_order && out.cofactor.degree() > 0; ++d) {
    if (euler_phi(d) > out.cofactor.degree()) continue;
    const auto phi = cyclotomic(d);
    while (out.cofactor.degree() >= phi.degree()) {
      auto [q, r] = divmod(out.cofactor, phi);
      if (!r.is_zero()) break;
      out.cofactor = q;
      out.orders.push_back(d);
    }
  }
  return out;
}

std::vector<RatPolynomial> sturm_chain(const RatPolynomial& p) {
  std::vector<RatPolynomial> chain{p, p.derivative()};
  while (!chain.back().is_zero() && chain.back().degree() > 0) {
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return chain;
}

namespace {

int sign_changes(const std::vector<RatPolynomial>& chain, const Rational& x) {
  int changes = 0;
  int last = 0;
  for (const auto& q : chain) {
    const Rational v = q.evaluate(x);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int count_real_roots(const std::vector<RatPolynomial>& chain, const Rational& a, const Rational& b) {
  return sign_changes(chain, a) - sign_changes(chain, b);
}

Rational root_bound(const RatPolynomial& p) {
  Rational bound = 0;
  const Rational lead = mp::abs(p.leading());
  for (int k = 0; k < p.degree(); ++k) {
    const Rational r = mp::abs(p.coeff(k)) / lead;
    if (r > bound) bound = r;
  }
  return bound + 1;
}

std::string to_string(const RatPolynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = p.degree(); k >= 0; --k) {
    const Rational c = p.coeff(k);
    if (c == 0) continue;
    if (!first) os << (c > 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    const Rational a = mp::abs(c);
    if (a != 1 || k == 0) os << a;
    if (k >= 1) os << (a != 1 ? "*t" : "t");
    if (k >= 2) os << "^" << k;
    first = false;
  }
  return os.str();
}

}  // namespace plab
