#pragma once

// Integral isometries of hyperbolic lattices and the elliptic/parabolic/loxodromic trichotomy.

#include "plab/lattice.hpp"
#include "plab/polynomial.hpp"

#include <variant>

namespace plab {

/// Integer matrix (columns = images of basis vectors) preserving the Gram matrix.
class LatticeIsometry {
 public:
  // Throws PreconditionError unless M^T G M = G.
  LatticeIsometry(QuadLattice lattice, IntMatrix matrix);

  const QuadLattice& lattice() const { return lattice_; }
  const IntMatrix& matrix() const { return matrix_; }
  Integer determinant() const;

  friend LatticeIsometry operator*(const LatticeIsometry& a, const LatticeIsometry& b);
  friend bool operator==(const LatticeIsometry& a, const LatticeIsometry& b) { return a.matrix_ == b.matrix_; }

 private:
  QuadLattice lattice_;
  IntMatrix matrix_;
};

bool verify_isometry(const QuadLattice& lattice, const IntMatrix& m);
LatticeIsometry identity_isometry(const QuadLattice& lattice);
LatticeIsometry inverse(const LatticeIsometry& g);
// Exact power by squaring; negative exponents use the inverse.
LatticeIsometry power(const LatticeIsometry& g, long k);
IntMatrix matrix_power(const IntMatrix& m, const Integer& k);

bool is_quasi_unipotent(const LatticeIsometry& g);
bool is_semisimple(const LatticeIsometry& g);

enum class IsometryTag { Elliptic, Parabolic, Loxodromic };
const char* to_string(IsometryTag tag);

struct EllipticData {
  long order = 1;
};
struct ParabolicData {
  IntVector fixed_vector;  // primitive, isotropic, first nonzero coordinate positive
  long unipotent_power = 1;  // g^k is unipotent
};
struct LoxodromicData {
  Real256 lambda;          // eigenvalue of largest modulus
  Real256 lambda_inverse;  // eigenvalue of smallest modulus, computed independently
  Eigen::VectorXd expanding;    // isotropic eigenvector for lambda, sup-norm 1
  Eigen::VectorXd contracting;  // isotropic eigenvector for lambda_inverse, sup-norm 1
};

struct IsometryClass {
  std::variant<EllipticData, ParabolicData, LoxodromicData> payload;
  RatPolynomial characteristic;
  std::vector<long> cyclotomic_orders;
  bool orientation_preserving = true;  // det = +1
  bool time_preserving = true;         // preserves the positive cone component
  // Outside SO+ the tag is still the algebraic one; this flag reports the gap.
  bool in_so_plus() const { return orientation_preserving && time_preserving; }

  IsometryTag tag() const { return static_cast<IsometryTag>(payload.index()); }
  const EllipticData& elliptic() const { return std::get<EllipticData>(payload); }
  const ParabolicData& parabolic() const { return std::get<ParabolicData>(payload); }
  const LoxodromicData& loxodromic() const { return std::get<LoxodromicData>(payload); }
};

IsometryClass classify(const LatticeIsometry& g);

/// Eichler transvection x -> x + q(x,v) e - q(x,e) v - q(v,v)/2 q(x,e) e.
/// Requires q(e,e) = 0 and q(e,v) = 0; the result fixes e and is parabolic unless v is a
/// multiple of e.
LatticeIsometry eichler_transvection(const QuadLattice& lattice, const IntVector& e, const IntVector& v);

struct LimitOptions {
  double tolerance = 1e-12;  // sup-norm change between successive doublings
  int max_doublings = 64;
};
struct LimitResult {
  Eigen::VectorXd direction;  // sup-norm 1, pairs positively with the start class
  int doublings = 0;
  Integer exponent;  // the iterate g^exponent(w) that met the tolerance
};
/// Normalized limit of g^i(w) for parabolic g and a positive class w. The exponent doubles
/// each round (exact integer powers), so the O(1/i) convergence costs O(log i) squarings.
LimitResult limit_nef_class(const LatticeIsometry& g, const Eigen::VectorXd& w, const LimitOptions& options = {});

}  // namespace plab
