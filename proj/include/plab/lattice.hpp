#pragma once

// Integral quadratic lattices carrying a Beauville-Bogomolov-Fujiki type form.

#include "plab/exact_linalg.hpp"
#include "plab/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plab {

struct Signature {
  int positive = 0;
  int negative = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

class DegenerateLatticeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Integral lattice given by a symmetric Gram matrix. Immutable; the inertia is computed
/// once at construction so instances can be shared freely across threads.
class QuadLattice {
 public:
  explicit QuadLattice(IntMatrix gram, bool allow_degenerate = false);

  Eigen::Index rank() const { return gram_.rows(); }
  const IntMatrix& gram() const { return gram_; }
  bool is_degenerate() const { return inertia_.zero > 0; }
  const Inertia& inertia() const { return inertia_; }
  // Throws DegenerateLatticeError when a zero eigenvalue is present.
  Signature signature() const;
  bool is_hyperbolic() const;  // signature (1, n) with n >= 1
  bool is_even() const;
  // Primitive integral vector of positive square, if the form has one.
  const std::optional<IntVector>& positive_vector() const { return positive_vector_; }

  const std::map<std::string, IntVector>& marks() const { return marks_; }
  QuadLattice with_mark(const std::string& name, IntVector v) const;

 private:
  IntMatrix gram_;
  Inertia inertia_;
  std::optional<IntVector> positive_vector_;
  std::map<std::string, IntVector> marks_;
};

Integer bbf_eval(const QuadLattice& lattice, const IntVector& u, const IntVector& v);
inline Integer bbf_square(const QuadLattice& lattice, const IntVector& v) { return bbf_eval(lattice, v, v); }
Signature signature(const QuadLattice& lattice);
bool is_isotropic(const QuadLattice& lattice, const IntVector& v);
bool is_primitive(const IntVector& v);

// Every nonzero vector of [-bound, bound]^n whose first nonzero coordinate is positive,
// in lexicographic order.
void for_each_in_box(Eigen::Index n, long bound, const std::function<void(const IntVector&)>& visit);

// Primitive isotropic vectors with max |coord| <= bound, one of each +-v pair, sorted.
std::vector<IntVector> find_isotropic(const QuadLattice& lattice, long coeff_bound);

struct Representation {
  Integer value;
  IntVector witness;  // lexicographically first sign-normalized primitive witness
};
// Values q(v, v) in [lo, hi] attained by primitive v in the box, ascending by value.
std::vector<Representation> represents_in_range(const QuadLattice& lattice, const Integer& lo, const Integer& hi,
                                                long coeff_bound);

/// Rank-3 lattice <a, x, y> with q(y, y) = 0, q(x, y) = 0, q(x, x) = -2N and q(a, y) = 1.
/// Every eta with q(eta, y) = 0 lies in span(x, y) and has q(eta, eta) = m^2 q(x, x), so the
/// negative classes orthogonal to y all have square <= -2N. (The argument this mirrors
/// states orthogonality to x and q = n^2 q(y, y); that reading is degenerate and the
/// y-orthogonal version is the one implemented.)
struct SeedLattice {
  QuadLattice lattice;
  IntVector a, x, y;
};
SeedLattice build_parabolic_seed_lattice(const Integer& a_sq, const Integer& n_bound);

struct SeedVerification {
  Signature signature;
  Integer q_y, q_x, q_xy;
  bool y_primitive = false;
  long scan_bound = 0;
  std::size_t scanned = 0;
  // Vectors eta with q(eta, y) = 0 and -N < q(eta, eta) < 0; must be empty.
  std::vector<IntVector> short_negatives;
  bool passed = false;
};
SeedVerification verify_seed_lattice(const SeedLattice& seed, const Integer& n_bound, long scan_bound);

QuadLattice hyperbolic_plane();
QuadLattice diagonal_lattice(const std::vector<long>& entries);
// E8 root lattice Gram (Cartan matrix); negated when `negative`.
QuadLattice e8_lattice(bool negative);
QuadLattice direct_sum(const QuadLattice& a, const QuadLattice& b);
QuadLattice k3_lattice();  // U^3 + E8(-1)^2

}  // namespace plab
