#pragma once

// Independent trichotomy oracle: minimal polynomial by Krylov dependence of matrix powers,
// squarefreeness by gcd with the derivative, and real roots outside [-1, 1] by Sturm
// sequences. Shares no code with plab's classifier beyond the number types.

#include "plab/types.hpp"

#include <string>
#include <vector>

namespace oracle {

using plab::Integer;
using plab::IntMatrix;
using plab::Rational;
using Poly = std::vector<Rational>;  // low degree first

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly remainder(Poly a, const Poly& b) {
  trim(a);
  const auto db = b.size() - 1;
  while (a.size() >= b.size()) {
    const Rational f = a.back() / b.back();
    const auto shift = a.size() - b.size();
    for (size_t j = 0; j <= db; ++j) a[shift + j] -= f * b[j];
    a.pop_back();
    trim(a);
  }
  return a;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * Rational(static_cast<long>(k)));
  trim(d);
  return d;
}

inline Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Minimal polynomial: first power of M that is a rational combination of lower powers.
inline Poly minimal_polynomial(const IntMatrix& m) {
  const auto n = m.rows();
  const auto n2 = static_cast<size_t>(n * n);
  std::vector<std::vector<Rational>> rows;  // echelon rows, each with its combination
  std::vector<std::vector<Rational>> combos;
  std::vector<size_t> pivots;
  IntMatrix power = plab::identity_int(n);
  for (Eigen::Index k = 0; k <= n; ++k) {
    std::vector<Rational> v(n2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) v[static_cast<size_t>(i * n + j)] = Rational(power(i, j));
    std::vector<Rational> combo(static_cast<size_t>(n) + 1, Rational(0));
    combo[static_cast<size_t>(k)] = 1;
    for (size_t r = 0; r < rows.size(); ++r) {
      const Rational f = v[pivots[r]] / rows[r][pivots[r]];
      if (f == 0) continue;
      for (size_t c = 0; c < n2; ++c) v[c] -= f * rows[r][c];
      for (size_t c = 0; c < combo.size(); ++c) combo[c] -= f * combos[r][c];
    }
    size_t piv = n2;
    for (size_t c = 0; c < n2; ++c)
      if (v[c] != 0) {
        piv = c;
        break;
      }
    if (piv == n2) {
      Poly p(combo.begin(), combo.begin() + k + 1);
      const Rational lead = p.back();
      for (auto& c : p) c /= lead;
      return p;
    }
    rows.push_back(v);
    combos.push_back(combo);
    pivots.push_back(piv);
    power = (power * m).eval();
  }
  throw std::logic_error("Cayley-Hamilton violated");
}

inline int sturm_count(const Poly& p, const Rational& a, const Rational& b) {
  std::vector<Poly> chain{p, derivative(p)};
  while (chain.back().size() > 1) {
    Poly r = remainder(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.push_back(r);
  }
  auto changes = [&](const Rational& x) {
    int count = 0, last = 0;
    for (const auto& q : chain) {
      const Rational v = eval(q, x);
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  return changes(a) - changes(b);
}

struct Verdict {
  std::string tag;
  long order = 0;
};

inline Verdict classify(const IntMatrix& m) {
  const Poly minimal = minimal_polynomial(m);
  const Poly g = gcd(minimal, derivative(minimal));
  const bool squarefree = g.size() <= 1;
  Poly rad = minimal;
  if (!squarefree) {
    // exact division minimal / g
    Poly q(minimal.size() - g.size() + 1, Rational(0));
    Poly r = minimal;
    for (size_t k = q.size(); k-- > 0;) {
      q[k] = r[k + g.size() - 1] / g.back();
      for (size_t j = 0; j < g.size(); ++j) r[k + j] -= q[k] * g[j];
    }
    rad = q;
  }
  Rational bound = 1;
  for (size_t k = 0; k + 1 < rad.size(); ++k) {
    const Rational c = plab::mp::abs(rad[k] / rad.back());
    if (c + 1 > bound) bound = c + 1;
  }
  // Real roots with |r| > 1; +-1 themselves are excluded by the half-open ends.
  const int outside = sturm_count(rad, Rational(1), bound) + sturm_count(rad, -bound, Rational(-1)) -
                      (eval(rad, Rational(-1)) == 0 ? 1 : 0);
  if (outside > 0) return {"Loxodromic", 0};
  if (!squarefree) return {"Parabolic", 0};
  IntMatrix power = m;
  const IntMatrix id = plab::identity_int(m.rows());
  for (long k = 1; k <= 100000; ++k) {
    if (power == id) return {"Elliptic", k};
    power = (power * m).eval();
  }
  return {"Elliptic?", -1};
}

}  // namespace oracle
