#pragma once

// Exact real numbers of the form r_0 + sum_d r_d sqrt(d) with rational r and squarefree
// d > 1, closed under +, -, * and division by rationals. Distinct sqrt(d) are linearly
// independent over Q, which is what makes exact relation detection possible.

#include "plab/polynomial.hpp"
#include "plab/types.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace plab {

class SurdSum {
 public:
  SurdSum() = default;
  SurdSum(long v) : SurdSum(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  SurdSum(const Rational& r);                 // NOLINT(google-explicit-constructor)

  // sqrt of a nonnegative rational.
  static SurdSum sqrt_of(const Rational& r);

  // Squarefree radicand -> coefficient; key 1 is the rational part.
  const std::map<Integer, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  Rational rational_part() const;

  SurdSum& operator+=(const SurdSum& o);
  SurdSum& operator-=(const SurdSum& o);
  friend SurdSum operator+(SurdSum a, const SurdSum& b) { return a += b; }
  friend SurdSum operator-(SurdSum a, const SurdSum& b) { return a -= b; }
  friend SurdSum operator-(const SurdSum& a);
  friend SurdSum operator*(const SurdSum& a, const SurdSum& b);
  friend SurdSum operator/(const SurdSum& a, const Rational& b);
  friend bool operator==(const SurdSum& a, const SurdSum& b) { return a.terms_ == b.terms_; }

  template <typename Real>
  Real to_real() const {
    Real acc = 0;
    for (const auto& [d, c] : terms_) {
      const Real coeff = rational_to_real<Real>(c);
      acc += d == 1 ? coeff : coeff * mp::sqrt(integer_to_real<Real>(d));
    }
    return acc;
  }

  // Exact floor: decided at 512 bits and confirmed by exact comparison with the candidate.
  Integer floor() const;
  SurdSum fractional_part() const { return *this - SurdSum(Rational(floor())); }

  std::string to_string() const;

 private:
  void add_term(const Integer& d, const Rational& c);
  std::map<Integer, Rational> terms_;
};

// Polynomial in one variable t with SurdSum coefficients (low degree first).
class SurdPolynomial {
 public:
  SurdPolynomial() = default;
  explicit SurdPolynomial(std::vector<SurdSum> coeffs);
  static SurdPolynomial constant(const SurdSum& c) { return SurdPolynomial({c}); }
  static SurdPolynomial variable() { return SurdPolynomial({SurdSum(0), SurdSum(1)}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<SurdSum>& coeffs() const { return coeffs_; }
  bool is_constant() const { return coeffs_.size() <= 1; }
  SurdSum constant_term() const { return coeffs_.empty() ? SurdSum(0) : coeffs_.front(); }
  SurdSum evaluate(const SurdSum& t) const;

  friend SurdPolynomial operator+(const SurdPolynomial& a, const SurdPolynomial& b);
  friend SurdPolynomial operator-(const SurdPolynomial& a);
  friend SurdPolynomial operator*(const SurdPolynomial& a, const SurdPolynomial& b);

 private:
  void trim();
  std::vector<SurdSum> coeffs_;
};

class ParseError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary | primary)*   juxtaposition multiplies: 2sqrt3
///   unary   := '-' unary | power
///   power   := primary ('^' integer)?
///   primary := decimal | 'sqrt' integer | 'sqrt' '(' expr ')' | 't' | '(' expr ')'
/// Division and sqrt only accept rational operands; 't' only when allow_variable is set.
SurdPolynomial parse_expression(std::string_view text, bool allow_variable = false);
SurdSum parse_number(std::string_view text);
// Splits on top-level commas.
std::vector<std::string> split_list(std::string_view text, char separator = ',');
std::vector<SurdSum> parse_number_list(std::string_view text);

}  // namespace plab
