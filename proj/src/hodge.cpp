#include "plab/hodge.hpp"

#include <cfloat>
#include <cmath>

namespace plab {

FujikiStructure::FujikiStructure(QuadLattice l, int half_dim, Rational top, Rational polarized)
    : lattice(std::move(l)), n(half_dim), c(std::move(top)), K(std::move(polarized)) {
  if (n < 1) throw PreconditionError("n must be at least 1");
  if (c <= 0 || K <= 0) throw PreconditionError("Fujiki constants must be positive");
}

HermitianForm::HermitianForm(Mat entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw PreconditionError("Hermitian form needs a nonempty square matrix");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw PreconditionError("matrix is not Hermitian");
  entries_ = (entries_ + entries_.adjoint()) / 2.0;
  llt_.compute(entries_);
  if (llt_.info() != Eigen::Success) throw PreconditionError("matrix is not positive-definite");
  const Mat& L = llt_.matrixLLT();
  for (Eigen::Index i = 0; i < n(); ++i)
    if (!(L(i, i).real() > 0)) throw PreconditionError("matrix is not positive-definite");
}

double HermitianForm::log_det() const {
  const Mat& L = llt_.matrixLLT();
  double s = 0;
  for (Eigen::Index i = 0; i < n(); ++i) s += 2 * std::log(L(i, i).real());
  return s;
}

double HermitianForm::max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

MixedRatios amgm_mixed_ratios(const HermitianForm& h1, const HermitianForm& h2) {
  if (h1.n() != h2.n()) throw PreconditionError("forms have different dimensions");
  // L^-1 H1 L^-* with H2 = L L*; its trace equals Tr(H1 H2^-1)
  const auto L = h2.cholesky().matrixL();
  const HermitianForm::Mat x = L.solve(h1.entries());
  const HermitianForm::Mat a = L.solve(HermitianForm::Mat(x.adjoint())).adjoint();
  MixedRatios out;
  out.mean = a.trace().real() / static_cast<double>(h1.n());
  out.detratio = std::exp(h1.log_det() - h2.log_det());
  return out;
}

std::string to_string(RigidityVerdict v) {
  switch (v) {
    case RigidityVerdict::Equal:
      return "Equal";
    case RigidityVerdict::PremiseViolated:
      return "PremiseViolated";
    case RigidityVerdict::Counterexample:
      return "Counterexample";
  }
  return "?";
}

double rigidity_bound(Eigen::Index n, double h2_max, double tol) {
  // Round-off in the ratios themselves is folded into tol.
  const double eff = tol + 64.0 * static_cast<double>(n) * DBL_EPSILON;
  const double delta = static_cast<double>(n + 1) * eff * (1 + eff);
  // positive root of u - log(1 + u) = delta, by bisection (the function increases on u > 0)
  double lo = 0, hi = std::max(1.0, 4 * std::sqrt(delta));
  while (hi - std::log1p(hi) < delta) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (mid - std::log1p(mid) < delta ? lo : hi) = mid;
  }
  return static_cast<double>(n) * h2_max * hi * (1 + 1e-9);
}

RigidityReport amgm_rigidity_check(const HermitianForm& h1, const HermitianForm& h2, double tol) {
  RigidityReport out;
  out.ratios = amgm_mixed_ratios(h1, h2);
  out.distance = (h1.entries() - h2.entries()).cwiseAbs().maxCoeff();
  if (!(std::abs(out.ratios.mean - 1) < tol && std::abs(out.ratios.detratio - 1) < tol)) {
    out.verdict = RigidityVerdict::PremiseViolated;
    return out;
  }
  out.bound = rigidity_bound(h1.n(), h2.max_abs(), tol);
  out.verdict = out.distance <= out.bound ? RigidityVerdict::Equal : RigidityVerdict::Counterexample;
  return out;
}

MeanPair arithmetic_geometric(const std::vector<double>& alpha) {
  if (alpha.empty()) throw PreconditionError("need at least one number");
  double sum = 0, logs = 0;
  for (double a : alpha) {
    if (!(a > 0)) throw PreconditionError("AM-GM needs positive numbers");
    sum += a;
    logs += std::log(a);
  }
  const double m = static_cast<double>(alpha.size());
  return {sum / m, std::exp(logs / m)};
}

}  // namespace plab
