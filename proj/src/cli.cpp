#include "plab/cli.hpp"

#include "plab/hodge.hpp"
#include "plab/io.hpp"
#include "plab/isometry.hpp"
#include "plab/k3.hpp"
#include "plab/lattice.hpp"
#include "plab/surd.hpp"
#include "plab/torus.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace plab::cli {

namespace {

using io::Json;

constexpr std::uint64_t kFallbackSeed = 1;

std::uint64_t env_seed() {
  if (const char* s = std::getenv("PARABOLIC_LAB_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw io::FormatError("PARABOLIC_LAB_SEED is not an unsigned integer");
    }
  }
  return kFallbackSeed;
}

// Values shared by the subcommands; each leaf binds the ones it uses.
struct Options {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string output;
  std::string format = "json";
  std::string input, gram;
  // lattice
  std::string a_sq = "2", n_bound = "5", lo = "-4", hi = "-1";
  long scan_bound = 10, box = 5;
  // isometry
  std::string matrix, e, v, w;
  double limit_tol = 1e-12;
  int max_doublings = 64;
  // torus
  std::string coords, start, k_vec, family, grid_values;
  long n = 1000;
  int precision = 128, box_exponent = 0;
  double tol = 1e-24;
  std::string height_bound = "1000000";
  bool exact = false;
  // hodge
  int half_dim = 1;
  std::string c = "1", K = "1", eta, etas, h1, h2;
  double amgm_tol = 1e-9;
  // k3
  std::string surface, axis = "z", point, pair = "yz", base, test_function = "bx", pairs = "yz,xz";
  std::vector<int> grids{16};
  int mesh_factor = 16, trials = 16, contrast_fibers = 8, contrast_trials = 8;
  long word_length = 10000, burn_in = 1000, mc = 1000000, count = 1;
  double k3_tol = 1e-6;
  double min_mass_ratio = 0.1;
  bool contrast = false;
};

struct Leaf {
  CLI::App* app;
  std::string path;
  std::function<void(std::ostream&)> action;
};

class Runner {
 public:
  Runner() : app_("parabolic-lab: lattices, isometries, torus translations and (2,2,2) surfaces") {
    app_.name("parabolic-lab");
    app_.require_subcommand(1);
    app_.set_help_all_flag("--help-all", "Expand all help");
    build();
  }

  int operator()(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      opts_.seed = env_seed();
      app_.parse(reversed);
    } catch (const CLI::ParseError& e) {
      std::ostringstream msg;
      const int code = app_.exit(e, out, msg);
      err << msg.str();
      return code == 0 ? 0 : 1;
    } catch (const io::FormatError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    for (auto& leaf : leaves_) {
      if (!leaf.app->parsed()) continue;
      try {
        std::ostringstream buffer;
        leaf.action(buffer);
        write(buffer.str(), out);
        return 0;
      } catch (const io::FormatError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
      } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
      } catch (const NumericalContractError& e) {
        err << "numerical contract failure: " << e.what() << "\n";
        return 3;
      } catch (const PreconditionError& e) {
        err << "precondition violated: " << e.what() << "\n";
        return 2;
      } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
      }
    }
    err << "no command given\n";
    return 1;
  }

 private:
  void write(const std::string& text, std::ostream& out) const {
    if (opts_.output.empty() || opts_.output == "-") {
      out << text;
      return;
    }
    std::ofstream f(opts_.output, std::ios::binary);
    if (!f) throw io::FormatError("cannot write " + opts_.output);
    f << text;
  }

  CLI::App* group(const std::string& name, const std::string& desc) {
    auto* g = app_.add_subcommand(name, desc);
    g->require_subcommand(1);
    return g;
  }

  CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& desc,
                 std::function<void(std::ostream&)> action) {
    auto* a = parent->add_subcommand(name, desc);
    a->add_option("--seed", opts_.seed, "Master seed (default: $PARABOLIC_LAB_SEED or 1)");
    a->add_option("--output", opts_.output, "Write the artifact here instead of stdout");
    leaves_.push_back({a, parent->get_name() + " " + name, std::move(action)});
    return a;
  }

  // Option values of the active leaf in declaration order; --output and --workers cannot change the result.
  std::string config_string(const Leaf& leaf) const {
    std::string s = leaf.path;
    for (const CLI::Option* opt : leaf.app->get_options()) {
      const std::string name = opt->get_name();
      if (name == "--help" || name == "--output" || name == "--help-all" || name == "--workers") continue;
      s += "\n" + name + "=";
      if (name == "--seed") {
        s += std::to_string(opts_.seed);
      } else if (opt->count() > 0) {
        for (const auto& r : opt->results()) s += r + ",";
      } else {
        s += opt->get_default_str();
      }
    }
    return s;
  }

  const Leaf& active() const {
    for (const auto& l : leaves_)
      if (l.app->parsed()) return l;
    throw InternalError("no active command");
  }

  Json header() const {
    const Leaf& l = active();
    Json j;
    j["command"] = l.path;
    j["seed"] = opts_.seed;
    j["config_hash"] = io::hex64(io::fnv1a(config_string(l)));
    return j;
  }

  std::string csv_header() const {
    const Leaf& l = active();
    return "# command=" + l.path + " seed=" + std::to_string(opts_.seed) +
           " config_hash=" + io::hex64(io::fnv1a(config_string(l))) + "\n";
  }

  void emit(std::ostream& out, Json body) const {
    Json j = header();
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    out << io::dump(j) << "\n";
  }

  // ---- input helpers ----

  Json lattice_json() const {
    if (!opts_.gram.empty()) return io::parse(opts_.gram);
    if (!opts_.input.empty()) return io::parse(io::read_file(opts_.input));
    throw PreconditionError("give the lattice with --gram or --input");
  }

  LatticeIsometry isometry_input() const {
    if (!opts_.input.empty()) return io::isometry_from_json(io::parse(io::read_file(opts_.input)));
    if (!opts_.gram.empty() && !opts_.matrix.empty())
      return LatticeIsometry(io::lattice_from_json(io::parse(opts_.gram)),
                             io::int_matrix_from_json(io::parse(opts_.matrix)));
    throw PreconditionError("give the isometry with --input or --gram and --matrix");
  }

  static IntVector int_list(const std::string& text) {
    IntVector v(0);
    const auto parts = split_list(text);
    v.resize(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) {
      const SurdSum s = parse_number(parts[i]);
      if (!s.is_rational() || mp::denominator(s.rational_part()) != 1)
        throw ParseError("expected an integer, got '" + parts[i] + "'");
      v(static_cast<Eigen::Index>(i)) = Integer(mp::numerator(s.rational_part()));
    }
    return v;
  }

  static RatVector rational_list(const std::string& text) {
    const auto parts = split_list(text);
    RatVector v(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) {
      const SurdSum s = parse_number(parts[i]);
      if (!s.is_rational()) throw ParseError("expected a rational, got '" + parts[i] + "'");
      v(static_cast<Eigen::Index>(i)) = s.rational_part();
    }
    return v;
  }

  static Eigen::VectorXd double_list(const std::string& text) {
    const auto values = parse_number_list(text);
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i].to_real<Real128>().convert_to<double>();
    return v;
  }

  static Integer integer_arg(const std::string& text, const std::string& what) {
    try {
      return Integer(text);
    } catch (const std::exception&) {
      // allow 1e6-style input
      const Rational r = io::rational_from_json(Json(text));
      if (mp::denominator(r) != 1) throw ParseError(what + " must be an integer");
      return Integer(mp::numerator(r));
    }
  }

  Surface222 surface_input() const {
    if (opts_.surface.empty()) return Surface222::reference();
    return io::surface_from_json(io::parse(io::read_file(opts_.surface)));
  }

  // ---- commands ----

  void build() {
    auto* lat = group("lattice", "Integral quadratic lattices");
    {
      auto* a = leaf(lat, "seed", "Build and verify the rank-3 parabolic seed lattice", [this](std::ostream& o) {
        const Integer a_sq = integer_arg(opts_.a_sq, "--a-sq"), N = integer_arg(opts_.n_bound, "--N");
        const auto seed = build_parabolic_seed_lattice(a_sq, N);
        const auto ver = verify_seed_lattice(seed, N, opts_.scan_bound);
        Json v;
        v["signature"] = Json::array({ver.signature.positive, ver.signature.negative});
        v["q_y"] = io::to_json(ver.q_y);
        v["q_x"] = io::to_json(ver.q_x);
        v["q_xy"] = io::to_json(ver.q_xy);
        v["y_primitive"] = ver.y_primitive;
        v["scan_bound"] = ver.scan_bound;
        v["scanned"] = ver.scanned;
        Json sn = Json::array();
        for (const auto& s : ver.short_negatives) sn.push_back(io::to_json(s));
        v["short_negatives"] = sn;
        v["passed"] = ver.passed;
        emit(o, Json{{"gram", io::to_json(seed.lattice.gram())},
                     {"a", io::to_json(seed.a)},
                     {"x", io::to_json(seed.x)},
                     {"y", io::to_json(seed.y)},
                     {"verification", v}});
      });
      a->add_option("--a-sq", opts_.a_sq, "q(a, a)")->capture_default_str();
      a->add_option("--N", opts_.n_bound, "MBM bound N")->capture_default_str();
      a->add_option("--scan-bound", opts_.scan_bound, "Coefficient bound of the exhaustive scan")->capture_default_str();

      auto add_lattice_input = [this](CLI::App* s) {
        s->add_option("-i,--input", opts_.input, "Lattice JSON file {\"gram\": [[...]]}");
        s->add_option("--gram", opts_.gram, "Gram matrix as inline JSON");
      };
      auto* s = leaf(lat, "signature", "Signature and basic invariants", [this](std::ostream& o) {
        const QuadLattice l = io::lattice_from_json(lattice_json(), true);
        const auto in = l.inertia();
        Json j;
        j["rank"] = l.rank();
        j["inertia"] = Json{{"positive", in.positive}, {"negative", in.negative}, {"zero", in.zero}};
        j["degenerate"] = l.is_degenerate();
        if (l.is_degenerate()) {
          j["signature"] = nullptr;
        } else {
          j["signature"] = Json::array({in.positive, in.negative});
          j["determinant"] = io::to_json(determinant(l.gram()));
        }
        j["even"] = l.is_even();
        j["hyperbolic"] = l.is_hyperbolic();
        emit(o, j);
      });
      add_lattice_input(s);
      auto* iso = leaf(lat, "isotropic", "Primitive isotropic vectors in a box", [this](std::ostream& o) {
        const QuadLattice l = io::lattice_from_json(lattice_json(), true);
        Json vs = Json::array();
        for (const auto& v : find_isotropic(l, opts_.box)) vs.push_back(io::to_json(v));
        emit(o, Json{{"bound", opts_.box}, {"count", vs.size()}, {"vectors", vs}});
      });
      add_lattice_input(iso);
      iso->add_option("--bound", opts_.box, "Coefficient bound")->capture_default_str();
      auto* rep = leaf(lat, "represent", "Values of q attained in a range", [this](std::ostream& o) {
        const QuadLattice l = io::lattice_from_json(lattice_json(), true);
        Json vs = Json::array();
        for (const auto& r : represents_in_range(l, integer_arg(opts_.lo, "--lo"), integer_arg(opts_.hi, "--hi"), opts_.box))
          vs.push_back(Json{{"value", io::to_json(r.value)}, {"witness", io::to_json(r.witness)}});
        emit(o, Json{{"bound", opts_.box}, {"values", vs}});
      });
      add_lattice_input(rep);
      rep->add_option("--lo", opts_.lo, "Lower end of the range")->capture_default_str();
      rep->add_option("--hi", opts_.hi, "Upper end of the range")->capture_default_str();
      rep->add_option("--bound", opts_.box, "Coefficient bound")->capture_default_str();
    }

    auto* isom = group("isometry", "Isometries of hyperbolic lattices");
    {
      auto add_iso_input = [this](CLI::App* s) {
        s->add_option("-i,--input", opts_.input, "Isometry JSON {\"gram\": ..., \"matrix\": ...}");
        s->add_option("--gram", opts_.gram, "Gram matrix as inline JSON");
        s->add_option("--matrix", opts_.matrix, "Matrix as inline JSON");
      };
      auto* ver = leaf(isom, "verify", "Check M^T G M = G", [this](std::ostream& o) {
        const IntMatrix g = !opts_.input.empty()
                                ? io::int_matrix_from_json(io::parse(io::read_file(opts_.input))["gram"])
                                : io::int_matrix_from_json(io::parse(opts_.gram));
        IntMatrix m;
        if (!opts_.input.empty())
          m = io::int_matrix_from_json(io::parse(io::read_file(opts_.input))["matrix"]);
        else if (!opts_.matrix.empty())
          m = io::int_matrix_from_json(io::parse(opts_.matrix));
        else
          throw PreconditionError("give the isometry with --input or --gram and --matrix");
        const QuadLattice l(g, true);
        const bool ok = verify_isometry(l, m);
        Json j{{"isometry", ok}};
        if (m.rows() == m.cols()) j["determinant"] = io::to_json(determinant(m));
        emit(o, j);
      });
      add_iso_input(ver);
      auto* cls = leaf(isom, "classify", "Elliptic / parabolic / loxodromic", [this](std::ostream& o) {
        emit(o, io::classification_to_json(classify(isometry_input())));
      });
      add_iso_input(cls);
      auto* tr = leaf(isom, "transvect", "Eichler transvection E(e, v)", [this](std::ostream& o) {
        const QuadLattice l = io::lattice_from_json(lattice_json());
        const auto g = eichler_transvection(l, int_list(opts_.e), int_list(opts_.v));
        emit(o, Json{{"gram", io::to_json(l.gram())},
                     {"matrix", io::to_json(g.matrix())},
                     {"classification", io::classification_to_json(classify(g))}});
      });
      tr->add_option("-i,--input", opts_.input, "Lattice JSON file");
      tr->add_option("--gram", opts_.gram, "Gram matrix as inline JSON");
      tr->add_option("--e", opts_.e, "Primitive isotropic vector, e.g. 1,0,0")->required();
      tr->add_option("--v", opts_.v, "Vector orthogonal to e")->required();
      auto* lim = leaf(isom, "limit", "Limit direction of g^k w / |g^k w|", [this](std::ostream& o) {
        LimitOptions lo;
        lo.tolerance = opts_.limit_tol;
        lo.max_doublings = opts_.max_doublings;
        const auto r = limit_nef_class(isometry_input(), double_list(opts_.w), lo);
        emit(o, Json{{"direction", io::to_json(r.direction)},
                     {"doublings", r.doublings},
                     {"exponent", io::to_json(r.exponent)},
                     {"tol", opts_.limit_tol}});
      });
      add_iso_input(lim);
      lim->add_option("--w", opts_.w, "Start class with q(w) > 0, e.g. 2,1,0")->required();
      lim->add_option("--tol", opts_.limit_tol, "Sup-norm change between doublings")->capture_default_str();
      lim->add_option("--max-doublings", opts_.max_doublings, "Cap on exponent doublings")->capture_default_str();
    }

    auto* tor = group("torus", "Translations of R^n / Z^n");
    {
      auto add_precision = [this](CLI::App* s) {
        s->add_option("--precision", opts_.precision, "Mantissa bits: 128, 256 or 512")
            ->capture_default_str()
            ->check(CLI::IsMember({128, 256, 512}));
      };
      auto* orb = leaf(tor, "orbit", "Orbit points start + k x, k = 1..n", [this](std::ostream& o) {
        dispatch_precision([&](auto tag) { torus_orbit(tag, o); });
      });
      orb->add_option("--coords", opts_.coords, "Translation vector, e.g. \"sqrt2, 1/3\"")->required();
      orb->add_option("--start", opts_.start, "Start point (default 0)");
      orb->add_option("--n", opts_.n, "Orbit length")->capture_default_str();
      orb->add_option("--box", opts_.box_exponent, "Also report coverage of the 2^m grid (1..6)");
      orb->add_option("--format", opts_.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
      add_precision(orb);
      auto* hull = leaf(tor, "hull", "Rational hull of the orbit closure", [this](std::ostream& o) {
        if (opts_.exact) {
          emit(o, hull_json(rational_hull_exact(parse_number_list(opts_.coords))));
          return;
        }
        dispatch_precision([&](auto tag) {
          using Real = typename decltype(tag)::type;
          HullOptions h;
          h.tol = opts_.tol;
          h.height_bound = integer_arg(opts_.height_bound, "--height-bound");
          emit(o, hull_json(rational_hull(TranslationVector<Real>::from_exact(parse_number_list(opts_.coords)), h)));
        });
      });
      hull->add_option("--coords", opts_.coords, "Translation vector, e.g. \"sqrt2, 2*sqrt2\"")->required();
      hull->add_option("--tol", opts_.tol, "Residue threshold")->capture_default_str();
      hull->add_option("--height-bound", opts_.height_bound, "Largest accepted coefficient")->capture_default_str();
      hull->add_flag("--exact", opts_.exact, "Exact relations over Q instead of lattice reduction");
      add_precision(hull);
      auto* weyl = leaf(tor, "weyl", "Weyl sum |(1/N) sum e(k . j x)|", [this](std::ostream& o) {
        dispatch_precision([&](auto tag) {
          using Real = typename decltype(tag)::type;
          const auto x = TranslationVector<Real>::from_exact(parse_number_list(opts_.coords));
          emit(o, Json{{"magnitude", weyl_sum(x, int_list(opts_.k_vec), opts_.n)}, {"n", opts_.n}});
        });
      });
      weyl->add_option("--coords", opts_.coords, "Translation vector")->required();
      weyl->add_option("--k", opts_.k_vec, "Frequency vector, e.g. 1,0")->required();
      weyl->add_option("--n", opts_.n, "Number of terms")->capture_default_str();
      add_precision(weyl);
      auto* scan = leaf(tor, "scan", "Hull dimension along a polynomial family", [this](std::ostream& o) {
        std::vector<SurdPolynomial> fam;
        for (const auto& p : split_list(opts_.family)) fam.push_back(parse_expression(p, true));
        const auto grid_text = split_list(opts_.grid_values);
        std::vector<SurdSum> grid;
        for (const auto& g : grid_text) grid.push_back(parse_number(g));
        const auto rep = semicontinuity_scan(fam, grid, opts_.workers);
        Json pts = Json::array(), exc = Json::array();
        for (size_t i = 0; i < rep.points.size(); ++i) {
          Json rel = Json::array();
          for (const auto& r : rep.points[i].relations) rel.push_back(io::to_json(r));
          pts.push_back(Json{{"t", rep.points[i].t.to_string()}, {"dim", rep.points[i].dim}, {"relations", rel}});
        }
        for (size_t i : rep.exceptional) exc.push_back(rep.points[i].t.to_string());
        emit(o, Json{{"points", pts}, {"max_dim", rep.max_dim}, {"exceptional", exc}});
      });
      scan->add_option("--family", opts_.family, "Coordinates as polynomials in t, e.g. \"t*sqrt2, sqrt2\"")->required();
      scan->add_option("--grid", opts_.grid_values, "Values of t, e.g. \"1/2, 1, sqrt3\"")->required();
      scan->add_option("--workers", opts_.workers, "Worker threads (output does not depend on it)")->capture_default_str();
    }

    auto* hod = group("hodge", "Fujiki relations and Hermitian AM-GM rigidity");
    {
      auto* fj = leaf(hod, "fujiki", "c q(eta)^n and the polarized permutation sum", [this](std::ostream& o) {
        const QuadLattice l = io::lattice_from_json(lattice_json(), true);
        const FujikiStructure F(l, opts_.half_dim, io::rational_from_json(Json(opts_.c)),
                                io::rational_from_json(Json(opts_.K)));
        Json j;
        if (!opts_.eta.empty()) j["top"] = io::to_json(fujiki_top(F, rational_list(opts_.eta)));
        if (!opts_.etas.empty()) {
          std::vector<RatVector> vs;
          for (const auto& part : split_list(opts_.etas, ';')) vs.push_back(rational_list(part));
          j["polarized"] = io::to_json(fujiki_polarized_bruteforce(F, vs));
        }
        if (j.empty()) throw PreconditionError("give --eta and/or --etas");
        j["n"] = opts_.half_dim;
        j["c"] = io::to_json(F.c);
        j["K"] = io::to_json(F.K);
        emit(o, j);
      });
      fj->add_option("-i,--input", opts_.input, "Lattice JSON file");
      fj->add_option("--gram", opts_.gram, "Gram matrix as inline JSON");
      fj->add_option("--n", opts_.half_dim, "Half the complex dimension")->capture_default_str();
      fj->add_option("--c", opts_.c, "Top constant")->capture_default_str();
      fj->add_option("--K", opts_.K, "Polarized constant")->capture_default_str();
      fj->add_option("--eta", opts_.eta, "Class for the top form, e.g. 1,2,1");
      fj->add_option("--etas", opts_.etas, "2n classes separated by ';' for the polarized sum");
      auto* hf = leaf(hod, "hafnian", "Hafnian, with the permutation-sum identity when small", [this](std::ostream& o) {
        const Json m = !opts_.matrix.empty() ? io::parse(opts_.matrix) : io::parse(io::read_file(opts_.input));
        const auto A = io::rational_matrix_from_json(m.is_object() ? m["matrix"] : m);
        const Rational h = hafnian(A);
        Json j{{"hafnian", io::to_json(h)}, {"size", A.rows()}};
        if (A.rows() <= kMaxBruteforceSize) {
          const Rational s = paired_permutation_sum(A);
          Rational scale = 1;
          for (int k = 1; k <= A.rows() / 2; ++k) scale *= 2 * k;  // 2^n n!
          j["permutation_sum"] = io::to_json(s);
          j["identity_holds"] = s == scale * h;
        }
        emit(o, j);
      });
      hf->add_option("--matrix", opts_.matrix, "Symmetric matrix as inline JSON (rationals as \"p/q\")");
      hf->add_option("-i,--input", opts_.input, "Matrix JSON file");
      auto* am = leaf(hod, "amgm", "Mixed ratios and the rigidity verdict for H1, H2", [this](std::ostream& o) {
        const HermitianForm a(io::complex_matrix_from_json(io::parse(opts_.h1)));
        const HermitianForm b(io::complex_matrix_from_json(io::parse(opts_.h2)));
        const auto r = amgm_rigidity_check(a, b, opts_.amgm_tol);
        emit(o, Json{{"mean", r.ratios.mean},
                     {"detratio", r.ratios.detratio},
                     {"verdict", to_string(r.verdict)},
                     {"distance", r.distance},
                     {"bound", r.bound},
                     {"tol", opts_.amgm_tol}});
      });
      am->add_option("--h1", opts_.h1, "First form as JSON; entries number or [re, im]")->required();
      am->add_option("--h2", opts_.h2, "Second form")->required();
      am->add_option("--tol", opts_.amgm_tol, "Premise tolerance")->capture_default_str();
    }

    auto* k3 = group("k3", "Dynamics on a (2,2,2) surface in (P^1)^3");
    {
      auto add_surface = [this](CLI::App* s) {
        s->add_option("--surface", opts_.surface, "Surface JSON (default: the fixed-seed reference surface)");
      };
      auto* smp = leaf(k3, "sample", "Random points on the surface", [this](std::ostream& o) {
        const Surface222 S = surface_input();
        RngStream rng(opts_.seed);
        Json pts = Json::array();
        for (long i = 0; i < opts_.count; ++i) pts.push_back(io::point_to_json(sample_point(S, rng)));
        emit(o, Json{{"surface", io::surface_to_json(S)}, {"points", pts}});
      });
      add_surface(smp);
      smp->add_option("--n", opts_.count, "Number of points")->capture_default_str();
      auto* inv = leaf(k3, "involve", "Apply a covering involution", [this](std::ostream& o) {
        const Surface222 S = surface_input();
        RngStream rng(opts_.seed);
        const SurfacePoint p = opts_.point.empty() ? sample_point(S, rng) : io::point_from_json(S, io::parse(opts_.point));
        const Axis ax = parse_axis(opts_.axis);
        const SurfacePoint q = involution(S, ax, p);
        const SurfacePoint back = involution(S, ax, q);
        const auto ch = std::array<int, 3>{p.c[0].chart(), p.c[1].chart(), p.c[2].chart()};
        const cd f1 = S.affine_partial(p.c, ax, ch), f2 = S.affine_partial(q.c, ax, ch);
        emit(o, Json{{"axis", opts_.axis},
                     {"input", io::point_to_json(p)},
                     {"output", io::point_to_json(q)},
                     {"involution_error", point_distance(back, p)},
                     {"anti_symplectic_error", std::abs(f1 + f2) / std::max(1.0, std::abs(f1))},
                     {"tol", opts_.k3_tol},
                     {"passed", point_distance(back, p) < opts_.k3_tol}});
      });
      add_surface(inv);
      inv->add_option("--axis", opts_.axis, "x, y or z")->capture_default_str();
      inv->add_option("--point", opts_.point, "Point as JSON [[u_re,u_im,v_re,v_im] x 3] (default: sampled)");
      inv->add_option("--tol", opts_.k3_tol, "Tolerance for sigma^2 = id")->capture_default_str();
      auto* orb = leaf(k3, "orbit", "Fiber orbit of a parabolic map and its grid coverage", [this](std::ostream& o) {
        k3_orbit(o);
      });
      add_surface(orb);
      orb->add_option("--pair", opts_.pair, "Parabolic pair: yz, xz or xy")->capture_default_str();
      orb->add_option("--n", opts_.n, "Orbit length")->capture_default_str();
      orb->add_option("--grid", opts_.grids, "Grid resolutions G (repeatable)")->capture_default_str();
      orb->add_option("--mesh-factor", opts_.mesh_factor, "Fiber mesh density per cell")->capture_default_str();
      orb->add_option("--min-mass", opts_.min_mass_ratio, "Fiber-adjacent cells carry this multiple of the mean cell mass")
          ->capture_default_str();
      orb->add_option("--base", opts_.base, "Affine value of the fixed coordinate, \"re,im\" (default: sampled)");
      orb->add_option("--tol", opts_.k3_tol, "Tolerance of the translation check at the start")->capture_default_str();
      orb->add_option("--format", opts_.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
      auto* erg = leaf(k3, "ergo", "Birkhoff averages along random words (heuristic)", [this](std::ostream& o) {
        k3_ergo(o);
      });
      add_surface(erg);
      erg->add_option("--f", opts_.test_function, "Test function: one, bx, by, by_bz, re_x")->capture_default_str();
      erg->add_option("--pairs", opts_.pairs, "Parabolic maps used as letters")->capture_default_str();
      erg->add_option("--L", opts_.word_length, "Word length")->capture_default_str();
      erg->add_option("--trials", opts_.trials, "Independent trials")->capture_default_str();
      erg->add_option("--burn-in", opts_.burn_in, "Steps discarded before averaging")->capture_default_str();
      erg->add_option("--mc", opts_.mc, "Monte Carlo samples for the space average")->capture_default_str();
      erg->add_flag("--contrast", opts_.contrast, "Also run the single-map contrast test");
      erg->add_option("--contrast-fibers", opts_.contrast_fibers, "Fibers in the contrast test")->capture_default_str();
      erg->add_option("--contrast-trials", opts_.contrast_trials, "Starts per fiber in the contrast test")->capture_default_str();
      erg->add_option("--workers", opts_.workers, "Worker threads (output does not depend on it)")->capture_default_str();
    }
  }

  template <typename R>
  struct Tag {
    using type = R;
  };

  template <typename Fn>
  void dispatch_precision(Fn fn) const {
    switch (opts_.precision) {
      case 256:
        fn(Tag<Real256>{});
        break;
      case 512:
        fn(Tag<BinFloat<512>>{});
        break;
      default:
        fn(Tag<Real128>{});
    }
  }

  Json hull_json(const RationalSubspace& h) const {
    Json rel = Json::array();
    for (const auto& r : h.relations) rel.push_back(io::to_json(r));
    Json j{{"dim", h.dim}, {"relations", rel}, {"ambient_dim", h.ambient_dim}, {"dense", h.dense()}};
    j["subspace_basis"] = io::to_json(RatMatrix(h.subspace_basis.transpose()));
    j["exact"] = h.exact;
    if (h.exact) {
      j["tol"] = 0.0;
      j["height_bound"] = nullptr;
    } else {
      j["tol"] = h.tol;
      j["height_bound"] = io::to_json(h.height_bound);
    }
    return j;
  }

  template <typename TagT>
  void torus_orbit(TagT, std::ostream& o) const {
    using Real = typename TagT::type;
    const auto x = TranslationVector<Real>::from_exact(parse_number_list(opts_.coords));
    TorusPoint<Real> start;
    if (!opts_.start.empty())
      for (const auto& s : parse_number_list(opts_.start)) start.push_back(s.template to_real<Real>());
    if (opts_.format == "csv") {
      o << csv_header() << "k";
      for (size_t i = 1; i <= x.size(); ++i) o << ",x" << i;
      o << "\n";
      for_each_orbit_point(x, start, opts_.n, [&](long k, const TorusPoint<Real>& p) {
        o << k;
        for (const auto& c : p) o << "," << io::format_double(c.template convert_to<double>());
        o << "\n";
      });
      return;
    }
    Json pts = Json::array();
    for_each_orbit_point(x, start, opts_.n, [&](long, const TorusPoint<Real>& p) {
      Json row = Json::array();
      for (const auto& c : p) row.push_back(c.template convert_to<double>());
      pts.push_back(row);
    });
    Json j{{"n", opts_.n}, {"points", pts}};
    if (opts_.box_exponent > 0) j["coverage"] = box_coverage(x, start, opts_.n, opts_.box_exponent);
    emit(o, j);
  }

  void k3_orbit(std::ostream& o) const {
    const Surface222 S = surface_input();
    const AxisPair pair = parse_pair(opts_.pair);
    RngStream rng(opts_.seed);
    ProjCoord base;
    if (opts_.base.empty()) {
      base = ProjCoord::normalized(rng.complex_normal(), rng.complex_normal());
    } else {
      const auto v = double_list(opts_.base);
      if (v.size() != 2) throw ParseError("--base takes \"re,im\"");
      base = ProjCoord::normalized(cd(v(0), v(1)), 1.0);
    }
    const SurfacePoint start = sample_on_fiber(S, pair.fixed(), base, rng);
    FiberOptions fo;
    fo.grids = opts_.grids;
    fo.mesh_factor = opts_.mesh_factor;
    fo.min_mass_ratio = opts_.min_mass_ratio;
    if (opts_.format == "csv") {
      const Axis fixed = pair.fixed();
      std::array<Axis, 2> ab{};
      int k = 0;
      for (Axis a : {Axis::X, Axis::Y, Axis::Z})
        if (a != fixed) ab[k++] = a;
      const std::string na = to_string(ab[0]), nb = to_string(ab[1]);
      o << csv_header() << "step," << na << "_re," << na << "_im," << nb << "_re," << nb << "_im,chart_" << na
        << ",chart_" << nb << "\n";
      SurfacePoint p = start;
      for (long step = 0; step <= opts_.n; ++step) {
        if (step > 0) p = parabolic_map(S, pair, p);
        o << step;
        for (Axis a : ab) {
          const int ch = p[a].chart();
          const cd t = p[a].affine(ch);
          o << "," << io::format_double(t.real()) << "," << io::format_double(t.imag());
        }
        o << "," << p[ab[0]].chart() << "," << p[ab[1]].chart() << "\n";
      }
      return;
    }
    const auto rep = fiber_orbit(S, pair, start, opts_.n, fo);
    Json grids = Json::array(), cps = Json::array();
    for (const auto& g : rep.grids)
      grids.push_back(Json{{"G", g.grid},
                          {"occupied", g.occupied},
                          {"adjacent", g.adjacent},
                          {"coverage", g.coverage},
                          {"met", g.met},
                          {"visited", g.visited},
                          {"raw_coverage", g.raw_coverage}});
    for (const auto& [k, c] : rep.checkpoints) cps.push_back(Json::array({k, c}));
    const auto tc = translation_check(S, pair, start, opts_.k3_tol);
    emit(o, Json{{"pair", to_string(pair)},
                 {"base", Json::array({rep.base.u.real(), rep.base.u.imag(), rep.base.v.real(), rep.base.v.imag()})},
                 {"start", io::point_to_json(rep.start)},
                 {"n", rep.N},
                 {"grids", grids},
                 {"checkpoints", cps},
                 {"interruptions", rep.interruptions},
                 {"translation_check",
                  Json{{"ratio", Json::array({tc.ratio.real(), tc.ratio.imag()})},
                       {"deviation", tc.deviation},
                       {"tol", opts_.k3_tol},
                       {"passed", tc.passed}}}});
  }

  void k3_ergo(std::ostream& o) const {
    const Surface222 S = surface_input();
    ErgodicityOptions eo;
    eo.maps.clear();
    for (const auto& p : split_list(opts_.pairs)) eo.maps.push_back(parse_pair(p));
    eo.word_length = opts_.word_length;
    eo.trials = opts_.trials;
    eo.burn_in = opts_.burn_in;
    eo.mc_samples = opts_.mc;
    eo.seed = opts_.seed;
    eo.workers = opts_.workers;
    const TestFunction f = parse_test_function(opts_.test_function);
    const auto rep = birkhoff_ergodicity_test(S, f, eo);
    Json pairs = Json::array();
    for (const auto& m : eo.maps) pairs.push_back(to_string(m));
    Json j{{"label", ErgodicityReport::kLabel},
           {"f", to_string(f)},
           {"maps", pairs},
           {"word_length", eo.word_length},
           {"trials", eo.trials},
           {"trial_means", rep.trial_means},
           {"time_mean", rep.time_mean},
           {"time_stderr", rep.time_stderr},
           {"space_mean", rep.space.mean},
           {"space_stderr", rep.space.stderr_},
           {"mc_samples", rep.space.samples},
           {"z_score", rep.z_score},
           {"passed", rep.passed},
           {"interruptions", rep.interruptions}};
    if (opts_.contrast) {
      const auto c = single_parabolic_contrast(S, eo.maps.front(), TestFunction::BY, opts_.contrast_fibers,
                                               opts_.contrast_trials, eo.word_length, opts_.seed, opts_.workers);
      j["contrast"] = Json{{"label", ContrastReport::kLabel},
                           {"map", to_string(c.map)},
                           {"f", to_string(c.f)},
                           {"means", c.means},
                           {"cross_fiber_variance", c.cross_fiber_variance},
                           {"within_fiber_variance", c.within_fiber_variance},
                           {"ratio", c.ratio},
                           {"passed", c.ratio >= 10}};
    }
    emit(o, j);
  }

  CLI::App app_;
  Options opts_;
  std::vector<Leaf> leaves_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner;
  return runner(args, out, err);
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace plab::cli
