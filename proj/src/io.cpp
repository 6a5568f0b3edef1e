#include "plab/io.hpp"

#include "plab/surd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plab::io {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        dump_into(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        dump_into(v, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json to_json(const Integer& v) {
  if (mp::abs(v) <= (Integer(1) << 53)) return v.convert_to<long long>();
  return v.str();
}

Json to_json(const Rational& v) {
  if (mp::denominator(v) == 1) return to_json(Integer(mp::numerator(v)));
  return v.str();
}

Json to_json(const IntVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

Json to_json(const IntMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(IntVector(m.row(r).transpose())));
  return a;
}

Json to_json(const RatMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    a.push_back(row);
  }
  return a;
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Integer integer_from_json(const Json& j) {
  if (j.is_number_integer()) return Integer(j.get<long long>());
  if (j.is_number_unsigned()) return Integer(j.get<unsigned long long>());
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return Integer(static_cast<long long>(d));
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    try {
      return Integer(s);
    } catch (const std::exception&) {
    }
  }
  throw FormatError("expected an integer, got " + j.dump());
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer() || j.is_number_unsigned()) return Rational(integer_from_json(j));
  std::string text;
  if (j.is_number_float())
    text = format_double(j.get<double>());
  else if (j.is_string())
    text = j.get<std::string>();
  else
    throw FormatError("expected a rational, got " + j.dump());
  try {
    // decimal exponents are expanded by hand (the expression grammar has none)
    std::string mantissa = text;
    int ex = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
      size_t used = 0;
      ex = std::stoi(text.substr(e + 1), &used);
      if (used != text.size() - e - 1 || std::abs(ex) > 4000) throw FormatError("bad exponent in " + text);
      mantissa = text.substr(0, e);
    }
    const SurdSum v = parse_number(mantissa);
    if (!v.is_rational()) throw FormatError("expected a rational, got " + text);
    Rational r = v.rational_part();
    const Rational ten(10);
    for (int k = 0; k < std::abs(ex); ++k) r = ex > 0 ? r * ten : r / ten;
    return r;
  } catch (const ParseError& e) {
    throw FormatError(e.what());
  } catch (const std::logic_error&) {
    throw FormatError("expected a rational, got " + text);
  }
}

IntVector int_vector_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of integers");
  IntVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = integer_from_json(j[i]);
  return v;
}

IntMatrix int_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("expected a nonempty matrix");
  const size_t rows = j.size(), cols = j[0].size();
  IntMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = integer_from_json(j[r][c]);
  }
  return m;
}

Matrix<Rational> rational_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("expected a nonempty matrix");
  const size_t rows = j.size(), cols = j[0].size();
  Matrix<Rational> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = rational_from_json(j[r][c]);
  }
  return m;
}

Eigen::MatrixXcd complex_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("expected a nonempty matrix");
  const size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXcd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("ragged matrix");
    for (size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      if (e.is_number())
        m(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        m(r, c) = {e[0].get<double>(), e[1].get<double>()};
      else
        throw FormatError("matrix entries must be numbers or [re, im]");
    }
  }
  return m;
}

Json lattice_to_json(const QuadLattice& l) { return Json{{"gram", to_json(l.gram())}}; }

QuadLattice lattice_from_json(const Json& j, bool allow_degenerate) {
  if (j.is_array()) return QuadLattice(int_matrix_from_json(j), allow_degenerate);
  if (!j.is_object() || !j.contains("gram")) throw FormatError("lattice JSON needs a \"gram\" field");
  return QuadLattice(int_matrix_from_json(j["gram"]), allow_degenerate);
}

Json isometry_to_json(const LatticeIsometry& g) {
  return Json{{"gram", to_json(g.lattice().gram())}, {"matrix", to_json(g.matrix())}};
}

LatticeIsometry isometry_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("matrix")) throw FormatError("isometry JSON needs a \"matrix\" field");
  const QuadLattice l = j.contains("lattice") ? lattice_from_json(j["lattice"]) : lattice_from_json(j);
  return LatticeIsometry(l, int_matrix_from_json(j["matrix"]));
}

namespace {

std::string real256_string(const Real256& v) { return v.str(40, std::ios_base::scientific); }

}  // namespace

Json classification_to_json(const IsometryClass& c) {
  Json out;
  out["tag"] = to_string(c.tag());
  switch (c.tag()) {
    case IsometryTag::Elliptic:
      out["order"] = c.elliptic().order;
      break;
    case IsometryTag::Parabolic:
      out["fixed_vector"] = to_json(c.parabolic().fixed_vector);
      out["unipotent_power"] = c.parabolic().unipotent_power;
      break;
    case IsometryTag::Loxodromic: {
      const auto& l = c.loxodromic();
      out["lambda"] = l.lambda.convert_to<double>();
      out["lambda_digits"] = real256_string(l.lambda);
      out["lambda_inverse_digits"] = real256_string(l.lambda_inverse);
      out["expanding"] = to_json(l.expanding);
      out["contracting"] = to_json(l.contracting);
      break;
    }
  }
  Json poly = Json::array();
  for (const auto& co : c.characteristic.coeffs()) poly.push_back(to_json(co));
  out["characteristic_polynomial"] = poly;
  out["cyclotomic_orders"] = c.cyclotomic_orders;
  out["orientation_preserving"] = c.orientation_preserving;
  out["time_preserving"] = c.time_preserving;
  out["in_so_plus"] = c.in_so_plus();
  return out;
}

Json surface_to_json(const Surface222& s) {
  Json coeffs = Json::array();
  for (const auto& c : s.coeffs()) coeffs.push_back(Json::array({c.real(), c.imag()}));
  return Json{{"coeffs", coeffs}, {"seed", s.seed()}};
}

Surface222 surface_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].size() != 27)
    throw FormatError("surface JSON needs 27 coefficients");
  std::array<cd, 27> c;
  for (size_t i = 0; i < 27; ++i) {
    const Json& e = j["coeffs"][i];
    if (e.is_number())
      c[i] = e.get<double>();
    else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
      c[i] = {e[0].get<double>(), e[1].get<double>()};
    else
      throw FormatError("surface coefficients must be numbers or [re, im]");
  }
  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw FormatError("seed must be an integer");
    seed = j["seed"].get<std::uint64_t>();
  }
  return {c, seed};
}

Json point_to_json(const SurfacePoint& p) {
  Json a = Json::array();
  for (const auto& c : p.c) a.push_back(Json::array({c.u.real(), c.u.imag(), c.v.real(), c.v.imag()}));
  return Json{{"coords", a}, {"residual", p.residual}};
}

SurfacePoint point_from_json(const Surface222& s, const Json& j) {
  const Json& a = j.is_object() && j.contains("coords") ? j["coords"] : j;
  if (!a.is_array() || a.size() != 3) throw FormatError("a surface point has three coordinates");
  std::array<ProjCoord, 3> c;
  for (size_t i = 0; i < 3; ++i) {
    const Json& e = a[i];
    if (!e.is_array() || e.size() != 4) throw FormatError("coordinates are [u_re, u_im, v_re, v_im]");
    c[i] = ProjCoord::normalized({e[0].get<double>(), e[1].get<double>()}, {e[2].get<double>(), e[3].get<double>()});
  }
  return make_point(s, c);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace plab::io
