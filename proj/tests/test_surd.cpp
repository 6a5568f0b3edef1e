#include "doctest.h"

#include "plab/surd.hpp"

#include <cmath>
#include <random>

using namespace plab;

TEST_SUITE("surd") {

TEST_CASE("square roots reduce to squarefree radicands") {
  CHECK(SurdSum::sqrt_of(8) == SurdSum(2) * SurdSum::sqrt_of(2));
  CHECK(SurdSum::sqrt_of(Rational(3, 4)) == SurdSum::sqrt_of(3) / Rational(2));
  CHECK(SurdSum::sqrt_of(49) == SurdSum(7));
  CHECK(SurdSum::sqrt_of(0).is_zero());
  CHECK_THROWS_AS(SurdSum::sqrt_of(-2), PreconditionError);
}

TEST_CASE("ring operations") {
  const auto r2 = SurdSum::sqrt_of(2), r3 = SurdSum::sqrt_of(3);
  CHECK(r2 * r2 == SurdSum(2));
  CHECK(r2 * r3 == SurdSum::sqrt_of(6));
  CHECK(SurdSum::sqrt_of(6) * SurdSum::sqrt_of(10) == SurdSum(2) * SurdSum::sqrt_of(15));
  CHECK((SurdSum(1) + r2) * (SurdSum(1) - r2) == SurdSum(-1));
  CHECK((r2 - r2).is_zero());
  CHECK(r2.to_string() == "sqrt2");
  CHECK((SurdSum(1) - SurdSum(3) * r2 / Rational(2)).to_string() == "1 - 3/2*sqrt2");
}

TEST_CASE("floor and fractional part") {
  CHECK(SurdSum::sqrt_of(2).floor() == 1);
  CHECK((-SurdSum::sqrt_of(2)).floor() == -2);
  CHECK(SurdSum(Rational(-7, 2)).floor() == -4);
  CHECK(SurdSum(Rational(6, 2)).floor() == 3);
  CHECK(SurdSum(Rational(1, 3)).fractional_part() == SurdSum(Rational(1, 3)));
  // 1 + sqrt2 - sqrt2 exactly, then floors of near-integers
  CHECK((SurdSum(5) + SurdSum::sqrt_of(2) - SurdSum::sqrt_of(2)).floor() == 5);
  CHECK((SurdSum::sqrt_of(2) * SurdSum(1000) ).floor() == 1414);
}

TEST_CASE("random arithmetic agrees with double evaluation") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> small(-9, 9), rad(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    SurdSum a, b;
    double da = 0, db = 0;
    for (int k = 0; k < 3; ++k) {
      const int ca = small(rng), cb = small(rng), ra = rad(rng), rb = rad(rng);
      a += SurdSum(ca) * SurdSum::sqrt_of(ra);
      b += SurdSum(cb) * SurdSum::sqrt_of(rb);
      da += ca * std::sqrt(double(ra));
      db += cb * std::sqrt(double(rb));
    }
    CHECK(std::abs((a * b).to_real<Real128>().convert_to<double>() - da * db) < 1e-9);
    CHECK(std::abs((a - b).to_real<Real128>().convert_to<double>() - (da - db)) < 1e-12);
    if (std::abs(da - db - std::round(da - db)) > 1e-9) CHECK((a - b).floor() == Integer(static_cast<long>(std::floor(da - db))));
  }
}

TEST_CASE("expression parser") {
  CHECK(parse_number("sqrt2") == SurdSum::sqrt_of(2));
  CHECK(parse_number("2*sqrt2") == SurdSum(2) * SurdSum::sqrt_of(2));
  CHECK(parse_number("2sqrt3") == SurdSum(2) * SurdSum::sqrt_of(3));
  CHECK(parse_number("1+sqrt(2)") == SurdSum(1) + SurdSum::sqrt_of(2));
  CHECK(parse_number("(sqrt5-1)/2") == (SurdSum::sqrt_of(5) - SurdSum(1)) / Rational(2));
  CHECK(parse_number("0.25") == SurdSum(Rational(1, 4)));
  CHECK(parse_number("-1/3") == SurdSum(Rational(-1, 3)));
  CHECK(parse_number("sqrt(3/4)") == SurdSum::sqrt_of(Rational(3, 4)));
  CHECK(parse_number("(1+sqrt2)^2") == SurdSum(3) + SurdSum(2) * SurdSum::sqrt_of(2));
  CHECK(parse_number(" 3 - - 2 ") == SurdSum(5));

  const auto p = parse_expression("t*sqrt2 + t^2/2", true);
  CHECK(p.degree() == 2);
  CHECK(p.evaluate(SurdSum(2)) == SurdSum(2) + SurdSum(2) * SurdSum::sqrt_of(2));

  CHECK_THROWS_AS(parse_number("t"), ParseError);
  CHECK_THROWS_AS(parse_number("1/sqrt2"), ParseError);
  CHECK_THROWS_AS(parse_number("sqrt(sqrt2)"), ParseError);
  CHECK_THROWS_AS(parse_number("sqrt(-3)"), ParseError);
  CHECK_THROWS_AS(parse_number("1/0"), ParseError);
  CHECK_THROWS_AS(parse_number("2+"), ParseError);
  CHECK_THROWS_AS(parse_number("(2"), ParseError);
  CHECK_THROWS_AS(parse_number("2x"), ParseError);
}

TEST_CASE("list splitting respects parentheses") {
  const auto parts = split_list("sqrt(2),1/(3),t");
  REQUIRE(parts.size() == 3);
  CHECK(parts[1] == "1/(3)");
  const auto values = parse_number_list("sqrt2, 2*sqrt2");
  REQUIRE(values.size() == 2);
  CHECK(values[1] == SurdSum(2) * SurdSum::sqrt_of(2));
}

}
