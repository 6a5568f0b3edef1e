#pragma once

// JSON and CSV serialization. Output formatting is fixed (17 significant digits, compact
// JSON, no locale), so equal inputs give equal bytes.

#include "plab/isometry.hpp"
#include "plab/k3.hpp"
#include "plab/lattice.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>

namespace plab::io {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v);  // %.17g; non-finite values become "null" in JSON
std::string dump(const Json& j);
Json parse(const std::string& text);  // throws FormatError
std::string read_file(const std::string& path);

// Integers beyond 2^53 are written as decimal strings; readers accept both.
Json to_json(const Integer& v);
Json to_json(const Rational& v);  // integer when integral, else "p/q"
Json to_json(const IntVector& v);
Json to_json(const IntMatrix& m);
Json to_json(const RatMatrix& m);
Json to_json(const Eigen::VectorXd& v);

Integer integer_from_json(const Json& j);
Rational rational_from_json(const Json& j);  // integers, "p/q" strings or decimal literals
IntVector int_vector_from_json(const Json& j);
IntMatrix int_matrix_from_json(const Json& j);
Matrix<Rational> rational_matrix_from_json(const Json& j);
Eigen::MatrixXcd complex_matrix_from_json(const Json& j);  // entries: number or [re, im]

// {"gram": [[...]]}
Json lattice_to_json(const QuadLattice& l);
QuadLattice lattice_from_json(const Json& j, bool allow_degenerate = false);
// {"gram": [[...]], "matrix": [[...]]}; a nested {"lattice": {"gram": ...}} also works.
Json isometry_to_json(const LatticeIsometry& g);
LatticeIsometry isometry_from_json(const Json& j);
Json classification_to_json(const IsometryClass& c);

// {"coeffs": [[re, im] x 27], "seed": u64}; index i*9 + j*3 + k for x^i y^j z^k.
Json surface_to_json(const Surface222& s);
Surface222 surface_from_json(const Json& j);
// Each coordinate as [u_re, u_im, v_re, v_im].
Json point_to_json(const SurfacePoint& p);
SurfacePoint point_from_json(const Surface222& s, const Json& j);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace plab::io
