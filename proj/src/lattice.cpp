#include "plab/lattice.hpp"

#include <sstream>

namespace plab {

QuadLattice::QuadLattice(IntMatrix gram, bool allow_degenerate) : gram_(std::move(gram)) {
  if (gram_.rows() == 0 || gram_.rows() != gram_.cols()) throw PreconditionError("Gram matrix must be square and nonempty");
  if (gram_ != gram_.transpose()) throw PreconditionError("Gram matrix must be symmetric");
  const auto diag = diagonalize_symmetric(to_rational(gram_));
  inertia_ = diag.inertia;
  if (inertia_.zero > 0 && !allow_degenerate) throw DegenerateLatticeError("Gram matrix is degenerate");
  for (Eigen::Index k = 0; k < diag.diagonal.size(); ++k) {
    if (diag.diagonal(k) > 0) {
      positive_vector_ = primitive_integer_multiple(RatVector(diag.transform.col(k)));
      break;
    }
  }
}

Signature QuadLattice::signature() const {
  if (is_degenerate()) {
    std::ostringstream os;
    os << "degenerate lattice: " << inertia_.zero << " zero eigenvalue(s)";
    throw DegenerateLatticeError(os.str());
  }
  return {inertia_.positive, inertia_.negative};
}

bool QuadLattice::is_hyperbolic() const {
  return !is_degenerate() && inertia_.positive == 1 && inertia_.negative >= 1;
}

bool QuadLattice::is_even() const {
  for (Eigen::Index i = 0; i < rank(); ++i)
    if (gram_(i, i) % 2 != 0) return false;
  return true;
}

QuadLattice QuadLattice::with_mark(const std::string& name, IntVector v) const {
  if (v.size() != rank()) throw PreconditionError("mark '" + name + "' has wrong length");
  QuadLattice out = *this;
  out.marks_[name] = std::move(v);
  return out;
}

Integer bbf_eval(const QuadLattice& lattice, const IntVector& u, const IntVector& v) {
  if (u.size() != lattice.rank() || v.size() != lattice.rank())
    throw PreconditionError("vector length does not match lattice rank");
  const auto& g = lattice.gram();
  Integer acc = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (u(i) == 0) continue;
    Integer row = 0;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (v(j) != 0 && g(i, j) != 0) row += g(i, j) * v(j);
    acc += u(i) * row;
  }
  return acc;
}

Signature signature(const QuadLattice& lattice) { return lattice.signature(); }

bool is_isotropic(const QuadLattice& lattice, const IntVector& v) { return bbf_square(lattice, v) == 0; }

bool is_primitive(const IntVector& v) { return gcd_of(v) == 1; }

void for_each_in_box(Eigen::Index n, long bound, const std::function<void(const IntVector&)>& visit) {
  if (bound < 1 || n < 1) return;
  std::vector<long> c(static_cast<size_t>(n), -bound);
  IntVector v(n);
  while (true) {
    // first nonzero coordinate positive
    bool keep = false;
    for (long x : c) {
      if (x == 0) continue;
      keep = x > 0;
      break;
    }
    if (keep) {
      for (Eigen::Index i = 0; i < n; ++i) v(i) = c[static_cast<size_t>(i)];
      visit(v);
    }
    Eigen::Index k = n - 1;
    while (k >= 0 && c[static_cast<size_t>(k)] == bound) {
      c[static_cast<size_t>(k)] = -bound;
      --k;
    }
    if (k < 0) break;
    ++c[static_cast<size_t>(k)];
  }
}

std::vector<IntVector> find_isotropic(const QuadLattice& lattice, long coeff_bound) {
  if (coeff_bound < 1) throw PreconditionError("coefficient bound must be >= 1");
  std::vector<IntVector> out;
  for_each_in_box(lattice.rank(), coeff_bound, [&](const IntVector& v) {
    if (is_primitive(v) && is_isotropic(lattice, v)) out.push_back(v);
  });
  return out;
}

std::vector<Representation> represents_in_range(const QuadLattice& lattice, const Integer& lo, const Integer& hi,
                                                long coeff_bound) {
  if (lo > hi) throw PreconditionError("empty value range");
  if (coeff_bound < 1) throw PreconditionError("coefficient bound must be >= 1");
  std::map<Integer, IntVector> found;
  for_each_in_box(lattice.rank(), coeff_bound, [&](const IntVector& v) {
    const Integer q = bbf_square(lattice, v);
    if (q < lo || q > hi || found.count(q) != 0 || !is_primitive(v)) return;
    found.emplace(q, v);
  });
  std::vector<Representation> out;
  for (auto& [value, witness] : found) out.push_back({value, witness});
  return out;
}

SeedLattice build_parabolic_seed_lattice(const Integer& a_sq, const Integer& n_bound) {
  if (a_sq <= 0) throw PreconditionError("a_sq must be positive");
  if (n_bound < 1) throw PreconditionError("N must be >= 1");
  IntMatrix g(3, 3);
  g << a_sq, 0, 1, 0, -2 * n_bound, 0, 1, 0, 0;
  SeedLattice seed{QuadLattice(g), int_vector({1, 0, 0}), int_vector({0, 1, 0}), int_vector({0, 0, 1})};
  seed.lattice = seed.lattice.with_mark("a", seed.a).with_mark("x", seed.x).with_mark("y", seed.y);
  return seed;
}

SeedVerification verify_seed_lattice(const SeedLattice& seed, const Integer& n_bound, long scan_bound) {
  SeedVerification out;
  const auto& l = seed.lattice;
  out.signature = l.signature();
  out.q_y = bbf_square(l, seed.y);
  out.q_x = bbf_square(l, seed.x);
  out.q_xy = bbf_eval(l, seed.x, seed.y);
  out.y_primitive = is_primitive(seed.y);
  out.scan_bound = scan_bound;
  for_each_in_box(l.rank(), scan_bound, [&](const IntVector& eta) {
    ++out.scanned;
    if (bbf_eval(l, eta, seed.y) != 0) return;
    const Integer q = bbf_square(l, eta);
    if (q < 0 && q > -n_bound) out.short_negatives.push_back(eta);
  });
  out.passed = out.signature == Signature{1, 2} && out.q_y == 0 && out.q_xy == 0 && out.q_x <= -n_bound &&
               out.y_primitive && out.short_negatives.empty();
  return out;
}

QuadLattice hyperbolic_plane() { return QuadLattice(int_matrix({{0, 1}, {1, 0}})); }

QuadLattice diagonal_lattice(const std::vector<long>& entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  IntMatrix g = IntMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) g(i, i) = entries[static_cast<size_t>(i)];
  return QuadLattice(g);
}

QuadLattice e8_lattice(bool negative) {
  // Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
  IntMatrix g = IntMatrix::Zero(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i) g(i, i) = 2;
  const int edges[][2] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
  for (const auto& e : edges) g(e[0], e[1]) = g(e[1], e[0]) = -1;
  if (negative) g = (-g).eval();
  return QuadLattice(g);
}

QuadLattice direct_sum(const QuadLattice& a, const QuadLattice& b) {
  const auto n = a.rank() + b.rank();
  IntMatrix g = IntMatrix::Zero(n, n);
  g.topLeftCorner(a.rank(), a.rank()) = a.gram();
  g.bottomRightCorner(b.rank(), b.rank()) = b.gram();
  return QuadLattice(g);
}

QuadLattice k3_lattice() {
  const auto u = hyperbolic_plane();
  const auto e8 = e8_lattice(true);
  return direct_sum(direct_sum(direct_sum(u, u), direct_sum(u, e8)), e8);
}

}  // namespace plab
