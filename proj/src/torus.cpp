#include "plab/torus.hpp"

#include "plab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace plab {

std::vector<IntVector> saturate(const std::vector<IntVector>& rows, Eigen::Index width) {
  if (rows.empty()) return {};
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), width);
  for (size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  const IntMatrix complement = integer_kernel(m);
  std::vector<IntVector> out;
  if (complement.cols() == 0) {
    for (Eigen::Index i = 0; i < width; ++i) {
      IntVector e = IntVector::Zero(width);
      e(i) = 1;
      out.push_back(e);
    }
    return out;
  }
  const IntMatrix span = integer_kernel(IntMatrix(complement.transpose()));
  for (Eigen::Index c = 0; c < span.cols(); ++c) out.push_back(span.col(c));
  return out;
}

std::vector<IntVector> canonical_relations(const std::vector<IntVector>& rows) {
  if (rows.empty()) return {};
  auto embed = [](const IntVector& k) { return to_rational(k); };
  auto reduced = lll_reduce<Rational>(rows, embed, Rational(99, 100));
  for (auto& k : reduced) k = normalize_sign(k);
  auto key = [](const IntVector& k) {
    Integer h = 0;
    for (Eigen::Index i = 0; i < k.size(); ++i) h = max_of<Integer>(h, mp::abs(k(i)));
    return h;
  };
  std::sort(reduced.begin(), reduced.end(), [&](const IntVector& a, const IntVector& b) {
    const Integer ha = key(a), hb = key(b);
    if (ha != hb) return ha < hb;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) > b(i);
    return false;
  });
  return reduced;
}

RationalSubspace assemble_subspace(int n, std::vector<IntVector> relations) {
  RationalSubspace out;
  out.ambient_dim = n;
  RatMatrix xpart(static_cast<Eigen::Index>(relations.size()), n);
  for (size_t r = 0; r < relations.size(); ++r)
    for (int i = 0; i < n; ++i) xpart(static_cast<Eigen::Index>(r), i) = Rational(relations[r](i));
  if (relations.empty()) {
    out.subspace_basis = RatMatrix::Identity(n, n);
  } else {
    out.subspace_basis = kernel_basis<Rational>(xpart);
  }
  out.dim = static_cast<int>(out.subspace_basis.cols());
  out.relations = std::move(relations);
  return out;
}

double minimum_tolerance(int bits, const Integer& height_bound, int n) {
  // Residues of true relations are bounded by H (n + 1) ulp; 16 guard bits on top.
  return std::ldexp(1.0, -(bits - 16)) * height_bound.convert_to<double>() * (n + 1);
}

RationalSubspace rational_hull_exact(const std::vector<SurdSum>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw PreconditionError("empty translation vector");
  std::vector<SurdSum> xt;
  for (const auto& v : x) xt.push_back(v.fractional_part());
  xt.emplace_back(1);
  std::set<Integer> radicands;
  for (const auto& v : xt)
    for (const auto& [d, c] : v.terms()) radicands.insert(d);

  // One row per radicand: the sqrt(d) coefficient of k . (x, 1) must vanish.
  IntMatrix system(static_cast<Eigen::Index>(radicands.size()), n + 1);
  Eigen::Index row = 0;
  for (const auto& d : radicands) {
    RatVector coeffs(n + 1);
    for (int i = 0; i <= n; ++i) {
      auto it = xt[i].terms().find(d);
      coeffs(i) = it == xt[i].terms().end() ? Rational(0) : it->second;
    }
    system.row(row++) = primitive_integer_multiple(coeffs).transpose();
  }
  const IntMatrix kernel = integer_kernel(system);
  std::vector<IntVector> relations;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) relations.push_back(kernel.col(c));
  auto out = assemble_subspace(n, canonical_relations(relations));
  out.exact = true;
  return out;
}

ScanReport semicontinuity_scan(const std::vector<SurdPolynomial>& family, const std::vector<SurdSum>& grid,
                               unsigned workers) {
  if (family.empty()) throw PreconditionError("empty family");
  ScanReport report;
  report.points.resize(grid.size());
  parallel_for(grid.size(), workers, [&](size_t i) {
    std::vector<SurdSum> x;
    for (const auto& p : family) x.push_back(p.evaluate(grid[i]));
    const auto hull = rational_hull_exact(x);
    report.points[i] = ScanPoint{grid[i], hull.dim, hull.relations};
  });
  for (const auto& p : report.points) report.max_dim = std::max(report.max_dim, p.dim);
  for (size_t i = 0; i < report.points.size(); ++i)
    if (report.points[i].dim < report.max_dim) report.exceptional.push_back(i);
  return report;
}

}  // namespace plab
