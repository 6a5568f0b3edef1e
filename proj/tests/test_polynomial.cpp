#include "doctest.h"

#include "plab/exact_linalg.hpp"
#include "plab/polynomial.hpp"

using namespace plab;

namespace {
RatPolynomial poly(std::initializer_list<long> coeffs) {
  std::vector<Rational> v;
  for (long c : coeffs) v.emplace_back(c);
  return RatPolynomial(v);
}
}  // namespace

TEST_SUITE("polynomial") {
  TEST_CASE("cyclotomic polynomials") {
    CHECK(cyclotomic(1) == poly({-1, 1}));
    CHECK(cyclotomic(2) == poly({1, 1}));
    CHECK(cyclotomic(4) == poly({1, 0, 1}));
    CHECK(cyclotomic(6) == poly({1, -1, 1}));
    CHECK(cyclotomic(12) == poly({1, 0, -1, 0, 1}));
    for (long d = 1; d <= 40; ++d) CHECK(cyclotomic(d).degree() == euler_phi(d));
  }

  TEST_CASE("characteristic polynomial") {
    CHECK(characteristic_polynomial(int_matrix({{3, 2}, {4, 3}})) == poly({1, -6, 1}));
    CHECK(characteristic_polynomial(identity_int(3)) == poly({-1, 3, -3, 1}));
    // companion matrix of t^3 - 2t + 5
    CHECK(characteristic_polynomial(int_matrix({{0, 0, -5}, {1, 0, 2}, {0, 1, 0}})) == poly({5, -2, 0, 1}));
  }

  TEST_CASE("gcd, squarefree part, cyclotomic split") {
    const auto p = poly({-1, 1}) * poly({-1, 1}) * poly({1, 1});
    CHECK(squarefree_part(p) == poly({-1, 0, 1}));
    CHECK(polynomial_gcd(p, p.derivative()) == poly({-1, 1}));
    const auto split = split_cyclotomic(cyclotomic(5) * cyclotomic(1) * poly({1, -6, 1}));
    CHECK(split.cofactor == poly({1, -6, 1}));
    CHECK(split.orders == std::vector<long>{1, 5});
  }

  TEST_CASE("Sturm counts") {
    const auto p = poly({1, -6, 1});  // roots 3 +- 2 sqrt 2
    const auto chain = sturm_chain(p);
    CHECK(count_real_roots(chain, Rational(-10), Rational(10)) == 2);
    CHECK(count_real_roots(chain, Rational(1), Rational(10)) == 1);
    CHECK(count_real_roots(chain, Rational(-1), Rational(1)) == 1);
    CHECK(count_real_roots(sturm_chain(poly({1, 0, 1})), Rational(-5), Rational(5)) == 0);
    const auto root = refine_root<Real256>(p, Rational(5), Rational(6), 256);
    CHECK(mp::abs(root - (3 + 2 * mp::sqrt(Real256(2)))) < Real256(1e-70));
  }

  TEST_CASE("integer kernel is saturated") {
    const IntMatrix m = int_matrix({{2, 4, 6}});
    const IntMatrix k = integer_kernel(m);
    CHECK(k.cols() == 2);
    CHECK((m * k).isZero());
    // index 1 in Z^3 ∩ ker: HNF of the kernel rows matches the expected lattice
    CHECK(hermite_normal_form(IntMatrix(k.transpose())) == int_matrix({{1, 1, -1}, {0, 3, -2}}));
    CHECK(determinant(int_matrix({{2, 1}, {7, 4}})) == 1);
    CHECK(determinant(int_matrix({{0, 1, 2}, {1, 0, 3}, {4, -3, 8}})) == -2);
  }

  TEST_CASE("rational kernel and inverse") {
    RatMatrix a(2, 3);
    a << 1, 2, 3, 2, 4, 6;
    CHECK(rank(a) == 1);
    CHECK(kernel_basis(a).cols() == 2);
    RatMatrix b(2, 2);
    b << 2, 1, 1, 1;
    CHECK(RatMatrix(inverse_exact(b) * b) == RatMatrix::Identity(2, 2));
  }
}
