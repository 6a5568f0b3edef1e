#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace plab {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

template <unsigned Bits>
using BinFloat = mp::number<mp::cpp_bin_float<Bits, mp::digit_base_2>, mp::et_off>;

using Real128 = BinFloat<128>;
using Real256 = BinFloat<256>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using IntVector = Vector<Integer>;
using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;

using Complex = std::complex<double>;

// Caller violated a documented precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical contract could not be honoured (CLI exit code 3).
class NumericalContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreachable state; signals a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline IntVector int_vector(std::initializer_list<long> values) {
  IntVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (long x : values) v(i++) = x;
  return v;
}

inline IntMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  IntMatrix out(n, m);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != m) throw PreconditionError("ragged matrix literal");
    Eigen::Index j = 0;
    for (long x : row) out(i, j++) = x;
    ++i;
  }
  return out;
}

template <typename Scalar>
RatMatrix to_rational(const Matrix<Scalar>& m) {
  RatMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

inline RatVector to_rational(const IntVector& v) {
  RatVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = Rational(v(i));
  return out;
}

inline Eigen::VectorXd to_double(const IntVector& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).convert_to<double>();
  return out;
}

inline Eigen::MatrixXd to_double(const IntMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  return out;
}

}  // namespace plab

namespace plab {

// Exact when the integer fits the target mantissa; otherwise correctly rounded via decimal.
template <typename Real>
Real integer_to_real(const Integer& x) {
  if (x == 0) return Real(0);
  if (mp::msb(mp::abs(x)) < 62) return Real(x.convert_to<long long>());
  return Real(x.str());
}

template <typename Real>
Real rational_to_real(const Rational& x) {
  return integer_to_real<Real>(Integer(mp::numerator(x))) / integer_to_real<Real>(Integer(mp::denominator(x)));
}

template <typename T>
T max_of(const T& a, const T& b) {
  return a < b ? b : a;
}

// Nearest integer (ties away from zero).
template <typename Real>
Integer round_to_integer(const Real& x) {
  const Real r = mp::round(x);
  if (mp::abs(r) < Real(4.0e18)) return Integer(r.template convert_to<long long>());
  std::string digits = r.str(0, std::ios_base::fixed);
  if (const auto dot = digits.find('.'); dot != std::string::npos) digits.resize(dot);
  return Integer(digits);
}

inline Integer round_to_integer(const Rational& x) {
  const Integer num(mp::numerator(x)), den(mp::denominator(x));
  // floor(x + 1/2) for x >= 0, mirrored for x < 0
  if (x >= 0) return (2 * num + den) / (2 * den);
  return -((2 * (-num) + den) / (2 * den));
}

}  // namespace plab
