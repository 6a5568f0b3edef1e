#include "plab/surd.hpp"

#include <cctype>
#include <sstream>

namespace plab {

namespace {

using Real512 = BinFloat<512>;

// n = s^2 * r with r squarefree; returns {s, r}. Trial division: radicands are small.
std::pair<Integer, Integer> split_square(Integer n) {
  Integer s = 1, r = 1;
  for (Integer p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int k = 0; k < e / 2; ++k) s *= p;
    if (e % 2 == 1) r *= p;
  }
  r *= n;
  return {s, r};
}

}  // namespace

SurdSum::SurdSum(const Rational& r) { add_term(1, r); }

SurdSum SurdSum::sqrt_of(const Rational& r) {
  if (r < 0) throw PreconditionError("square root of a negative number");
  if (r == 0) return {};
  // sqrt(p/q) = sqrt(p q) / q
  const Integer p(mp::numerator(r)), q(mp::denominator(r));
  const auto [s, d] = split_square(p * q);
  SurdSum out;
  out.add_term(d, Rational(s) / Rational(q));
  return out;
}

void SurdSum::add_term(const Integer& d, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(d, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool SurdSum::is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1); }

Rational SurdSum::rational_part() const {
  auto it = terms_.find(Integer(1));
  return it == terms_.end() ? Rational(0) : it->second;
}

SurdSum& SurdSum::operator+=(const SurdSum& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, c);
  return *this;
}

SurdSum& SurdSum::operator-=(const SurdSum& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, -c);
  return *this;
}

SurdSum operator-(const SurdSum& a) {
  SurdSum out;
  for (const auto& [d, c] : a.terms_) out.add_term(d, -c);
  return out;
}

SurdSum operator*(const SurdSum& a, const SurdSum& b) {
  SurdSum out;
  for (const auto& [da, ca] : a.terms_)
    for (const auto& [db, cb] : b.terms_) {
      // sqrt(a) sqrt(b) = g sqrt((a/g)(b/g)) for squarefree a, b and g = gcd(a, b)
      const Integer g = mp::gcd(da, db);
      out.add_term((da / g) * (db / g), ca * cb * Rational(g));
    }
  return out;
}

SurdSum operator/(const SurdSum& a, const Rational& b) {
  if (b == 0) throw PreconditionError("division by zero");
  SurdSum out;
  for (const auto& [d, c] : a.terms_) out.add_term(d, c / b);
  return out;
}

Integer SurdSum::floor() const {
  if (is_rational()) {
    const Rational r = rational_part();
    const Integer num(mp::numerator(r)), den(mp::denominator(r));
    Integer q = num / den;
    if (num % den != 0 && num < 0) q -= 1;
    return q;
  }
  // An irrational value is never an integer, so 512 bits decide the floor unless the value
  // lies absurdly close to one; that case is rejected rather than guessed.
  const Real512 v = to_real<Real512>();
  const Real512 f = mp::floor(v);
  if (v - f < Real512(1e-140) || f + 1 - v < Real512(1e-140))
    throw NumericalContractError("cannot decide the floor of " + to_string());
  return round_to_integer(f);
}

std::string SurdSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [d, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    const Rational a = mp::abs(c);
    if (d == 1) {
      os << a;
    } else {
      if (a != 1) os << a << "*";
      os << "sqrt" << d;
    }
    first = false;
  }
  return os.str();
}

SurdPolynomial::SurdPolynomial(std::vector<SurdSum> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void SurdPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

SurdSum SurdPolynomial::evaluate(const SurdSum& t) const {
  SurdSum acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

SurdPolynomial operator+(const SurdPolynomial& a, const SurdPolynomial& b) {
  std::vector<SurdSum> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
  for (size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
  return SurdPolynomial(std::move(v));
}

SurdPolynomial operator-(const SurdPolynomial& a) {
  std::vector<SurdSum> v;
  for (const auto& c : a.coeffs_) v.push_back(-c);
  return SurdPolynomial(std::move(v));
}

SurdPolynomial operator*(const SurdPolynomial& a, const SurdPolynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<SurdSum> v(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return SurdPolynomial(std::move(v));
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, bool allow_variable) : text_(text), allow_variable_(allow_variable) {}

  SurdPolynomial parse() {
    auto value = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "parse error at offset " << pos_ << " in '" << text_ << "': " << what;
    throw ParseError(os.str());
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  bool starts_primary() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 's' || c == 't';
  }

  SurdPolynomial expr() {
    auto value = term();
    while (true) {
      if (accept('+'))
        value = value + term();
      else if (accept('-'))
        value = value + (-term());
      else
        return value;
    }
  }

  SurdPolynomial term() {
    auto value = unary();
    while (true) {
      if (accept('*')) {
        value = value * unary();
      } else if (accept('/')) {
        const auto d = unary();
        if (!d.is_constant() || !d.constant_term().is_rational())
          fail("division is only supported by rational constants");
        const Rational r = d.constant_term().rational_part();
        if (r == 0) fail("division by zero");
        std::vector<SurdSum> v;
        for (const auto& c : value.coeffs()) v.push_back(c / r);
        value = SurdPolynomial(std::move(v));
      } else if (starts_primary()) {
        value = value * power();
      } else {
        return value;
      }
    }
  }

  SurdPolynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  SurdPolynomial power() {
    auto base = primary();
    if (!accept('^')) return base;
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (e > 64) fail("exponent too large");
    SurdPolynomial out = SurdPolynomial::constant(SurdSum(1));
    for (int k = 0; k < e; ++k) out = out * base;
    return out;
  }

  Rational number() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Integer value = 0;
    Integer scale = 1;
    if (pos_ > start) value = Integer(std::string(text_.substr(start, pos_ - start)));
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      const auto frac_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      for (auto k = frac_start; k < pos_; ++k) {
        value = value * 10 + (text_[k] - '0');
        scale *= 10;
      }
      if (frac_start == pos_ && start + 1 == pos_) fail("lonely decimal point");
    }
    if (pos_ == start) fail("expected a number");
    return Rational(value) / Rational(scale);
  }

  SurdPolynomial primary() {
    skip_space();
    if (accept('(')) {
      auto value = expr();
      if (!accept(')')) fail("expected ')'");
      return value;
    }
    if (text_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      Rational radicand;
      if (accept('(')) {
        const auto inner = expr();
        if (!accept(')')) fail("expected ')'");
        if (!inner.is_constant() || !inner.constant_term().is_rational())
          fail("sqrt is only supported for rational arguments");
        radicand = inner.constant_term().rational_part();
      } else {
        radicand = number();
      }
      if (radicand < 0) fail("sqrt of a negative number");
      return SurdPolynomial::constant(SurdSum::sqrt_of(radicand));
    }
    if (pos_ < text_.size() && text_[pos_] == 't') {
      if (!allow_variable_) fail("the variable t is not allowed here");
      ++pos_;
      return SurdPolynomial::variable();
    }
    return SurdPolynomial::constant(SurdSum(number()));
  }

  std::string_view text_;
  bool allow_variable_;
  size_t pos_ = 0;
};

}  // namespace

SurdPolynomial parse_expression(std::string_view text, bool allow_variable) {
  return Parser(text, allow_variable).parse();
}

SurdSum parse_number(std::string_view text) { return parse_expression(text, false).constant_term(); }

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == separator && depth == 0) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

std::vector<SurdSum> parse_number_list(std::string_view text) {
  std::vector<SurdSum> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number(item));
  return out;
}

}  // namespace plab
