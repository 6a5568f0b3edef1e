// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "plab/hodge.hpp"
#include "plab/isometry.hpp"
#include "plab/k3.hpp"
#include "plab/lattice.hpp"
#include "plab/torus.hpp"
#include "support/isometry_generators.hpp"
#include "support/isometry_oracle.hpp"
#include "support/planted_hull.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace plab;

namespace {

// Pinned tolerances and budgets.
constexpr double kTrichotomySeconds = 30;
constexpr double kSeedSeconds = 10;
constexpr double kKernelSeconds = 60;
constexpr double kDensitySeconds = 300;
constexpr double kLimitTol = 1e-9;
constexpr double kHullTol = 1e-40;
constexpr long kHullHeight = 1000;
constexpr double kFujikiSpread = 1e-12;
constexpr double kMeanTol = 1e-12;
constexpr double kAmgmTol = 1e-9;
constexpr double kResidual = 1e-10;
constexpr double kInvolution = 1e-9;
constexpr double kAntiSymplectic = 1e-9;
constexpr double kMeasure = 1e-6;
constexpr double kCoverageThreshold = 0.95;
constexpr double kFiberFraction = 0.9;
constexpr double kContrastRatio = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "FAILED: ";
      detail << what << "; ";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 ----
void trichotomy(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sets = fuzz::standard_generator_sets();
  std::mt19937_64 rng(500500);
  int agree = 0, counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 500; ++trial) {
    const auto& set = sets[static_cast<size_t>(trial) % sets.size()];
    const auto g = fuzz::random_word(set, rng, 6);
    const auto c = classify(g);
    const auto ref = oracle::classify(g.matrix());
    bool ok = std::string(to_string(c.tag())) == ref.tag;
    if (ok && c.tag() == IsometryTag::Elliptic) ok = c.elliptic().order == ref.order;
    if (ok && c.tag() == IsometryTag::Parabolic) {
      const IntVector& v = c.parabolic().fixed_vector;
      const IntVector gv = g.matrix() * v;
      ok = is_isotropic(g.lattice(), v) && (gv == v || gv == IntVector(-v));
    }
    agree += ok;
    ++counts[static_cast<int>(c.tag())];
  }
  const double t = seconds_since(t0);
  o.detail << agree << "/500 agree (elliptic " << counts[0] << ", parabolic " << counts[1] << ", loxodromic "
           << counts[2] << "), " << t << " s; ";
  o.require(agree == 500, "disagreement with the oracle");
  o.require(counts[0] > 0 && counts[1] > 0 && counts[2] > 0, "a class was never generated");
  o.require(t < kTrichotomySeconds, "too slow");
}

// ---- 2 ----
void seed_grid(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const long a_values[] = {1, 2, 4, 6, 10}, n_values[] = {1, 2, 3, 5, 8};
  int passed = 0;
  for (long a : a_values)
    for (long n : n_values) {
      const auto seed = build_parabolic_seed_lattice(a, n);
      const auto& l = seed.lattice;
      bool ok = verify_seed_lattice(seed, n, 10).passed;
      // independent: eigenvalue signs, exact values, and our own box scan
      Eigen::Matrix3d g;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = l.gram()(i, j).convert_to<double>();
      const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(g).eigenvalues();
      ok = ok && ev(0) < 0 && ev(1) < 0 && ev(2) > 0;
      ok = ok && bbf_square(l, seed.y) == 0 && bbf_square(l, seed.x) <= -n;
      bool short_found = false;
      for_each_in_box(3, 10, [&](const IntVector& eta) {
        if (bbf_eval(l, eta, seed.y) != 0) return;
        const Integer q = bbf_square(l, eta);
        if (q < 0 && q > -n) short_found = true;
      });
      ok = ok && !short_found;
      passed += ok;
    }
  const double t = seconds_since(t0);
  o.detail << passed << "/25 lattices pass, " << t << " s; ";
  o.require(passed == 25, "a seed lattice failed");
  o.require(t < kSeedSeconds, "too slow");
}

// ---- 3 ----
void transvections(Outcome& o) {
  const std::vector<QuadLattice> lattices{
      direct_sum(hyperbolic_plane(), diagonal_lattice({-2})),
      direct_sum(hyperbolic_plane(), diagonal_lattice({-2, -2})),
      direct_sum(hyperbolic_plane(), diagonal_lattice({-4, -6})),
      build_parabolic_seed_lattice(2, 5).lattice,
      direct_sum(hyperbolic_plane(), diagonal_lattice({-2, -2, -2})),
  };
  std::mt19937_64 rng(333);
  int done = 0, ok_count = 0;
  double worst_limit = 0;
  while (done < 100) {
    const auto& l = lattices[static_cast<size_t>(done) % lattices.size()];
    const auto iso = find_isotropic(l, 2);
    const IntVector e = iso[rng() % iso.size()];
    const auto perp = fuzz::orthogonal_basis(l, e);
    std::uniform_int_distribution<int> c(-3, 3);
    IntVector v = IntVector::Zero(l.rank());
    for (const auto& b : perp) v += Integer(c(rng)) * b;
    if (is_isotropic(l, v)) continue;  // zero or a multiple of e: identity
    LatticeIsometry t = identity_isometry(l);
    try {
      t = eichler_transvection(l, e, v);
    } catch (const PreconditionError&) {
      continue;  // correction term not integral
    }
    ++done;
    bool ok = verify_isometry(l, t.matrix()) && IntVector(t.matrix() * e) == e;
    const auto cls = classify(t);
    ok = ok && cls.tag() == IsometryTag::Parabolic && cls.parabolic().fixed_vector == normalize_sign(e);
    // a start class inside the positive cone
    IntVector w;
    for (int tries = 0; tries < 10000; ++tries) {
      IntVector cand(l.rank());
      for (Eigen::Index i = 0; i < l.rank(); ++i) cand(i) = Integer(c(rng));
      if (bbf_square(l, cand) > 0) {
        w = cand;
        break;
      }
    }
    if (w.size() == 0) {
      ok = false;
    } else {
      Eigen::VectorXd wd(l.rank()), ed(l.rank());
      for (Eigen::Index i = 0; i < l.rank(); ++i) {
        wd(i) = w(i).convert_to<double>();
        ed(i) = e(i).convert_to<double>();
      }
      const auto lim = limit_nef_class(t, wd);
      ed /= ed.cwiseAbs().maxCoeff();
      if (bbf_eval(l, e, w) < 0) ed = -ed;
      const double dev = (lim.direction - ed).cwiseAbs().maxCoeff();
      worst_limit = std::max(worst_limit, dev);
      ok = ok && dev < kLimitTol;
    }
    ok_count += ok;
  }
  o.detail << ok_count << "/100 triples, worst limit deviation " << worst_limit << "; ";
  o.require(ok_count == 100, "a transvection check failed");
}

// ---- 4 ----
void hulls(Outcome& o) {
  std::mt19937_64 rng(4444);
  HullOptions budget;
  budget.tol = kHullTol;
  budget.height_bound = kHullHeight;
  int recovered = 0;
  long max_height = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int free_count = static_cast<int>(rng() % (n + 1));
    const auto inst = planted::make_instance(rng, n, free_count, 100, 300);
    for (const auto& r : inst.rows)
      for (Eigen::Index i = 0; i < r.size(); ++i) max_height = std::max(max_height, mp::abs(r(i)).convert_to<long>());
    const auto h = rational_hull(TranslationVector<Real256>::from_exact(inst.x), budget);
    recovered += h.dim == free_count && planted::recovers(inst, h.relations);
  }
  o.detail << recovered << "/200 planted lattices recovered (max planted height " << max_height << "); ";
  o.require(recovered == 200, "a planted lattice was not recovered");
  o.require(max_height <= kHullHeight, "planted height above the budget");

  const std::vector<SurdSum> pool{SurdSum::sqrt_of(2),  SurdSum::sqrt_of(3),  SurdSum::sqrt_of(5), SurdSum::sqrt_of(6),
                                  SurdSum::sqrt_of(10), SurdSum::sqrt_of(15), SurdSum::sqrt_of(30)};
  int full = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<size_t> pick(pool.size());
    for (size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    std::shuffle(pick.begin(), pick.end(), rng);
    // an invertible integer mix (unit upper triangular) of distinct radicals, plus a rational shift
    std::vector<SurdSum> x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = pool[pick[i]] + SurdSum(Rational(static_cast<long>(rng() % 7), 3));
      for (int j = i + 1; j < n; ++j) x[i] += SurdSum(static_cast<long>(rng() % 5) - 2) * pool[pick[j]];
    }
    const auto h = rational_hull(TranslationVector<Real256>::from_exact(x), budget);
    full += h.dim == n;
  }
  o.detail << full << "/50 radical combinations full-dimensional; ";
  o.require(full == 50, "an independent vector was reported dependent");
}

// ---- 5 ----
Rational factorial(int m) {
  Rational f = 1;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

void hafnian_fujiki(Outcome& o) {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> d(-6, 6), den(1, 5);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const int m = 2 * (1 + t % 4);
    Matrix<Rational> q(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) q(i, j) = q(j, i) = Rational(d(rng), den(rng));
    exact += paired_permutation_sum(q) == Rational(1 << (m / 2)) * factorial(m / 2) * hafnian(q);
  }
  o.detail << exact << "/100 matching-sum identities exact; ";
  o.require(exact == 100, "matching-sum identity failed");

  // 40320-term sums at n = 4 lose ~1e-12 in double, so the float check runs in 128 bits
  const QuadLattice l = direct_sum(hyperbolic_plane(), diagonal_lattice({-2, -2}));
  for (int n : {2, 3, 4}) {
    const FujikiStructure F(l, n, Rational(3), Rational(5));
    Real128 lo = 0, hi = 0;
    int used = 0;
    while (used < 50) {
      Vector<Real128> eta(4);
      for (int i = 0; i < 4; ++i) eta(i) = std::uniform_real_distribution<double>(-2, 2)(rng);
      const Real128 top = fujiki_top<Real128>(F, eta);
      if (mp::abs(top) < Real128(1e-3)) continue;
      const Real128 ratio = fujiki_polarized_bruteforce<Real128>(F, std::vector<Vector<Real128>>(2 * n, eta)) / top;
      if (used == 0) lo = hi = ratio;
      lo = mp::abs(ratio) < mp::abs(lo) ? ratio : lo;
      hi = mp::abs(ratio) > mp::abs(hi) ? ratio : hi;
      ++used;
    }
    const double spread = Real128(mp::abs(hi - lo) / mp::abs(hi)).convert_to<double>();
    // and exactly, on rational classes
    std::set<Rational> exact_ratios;
    for (int k = 0; k < 10; ++k) {
      RatVector eta(4);
      for (int i = 0; i < 4; ++i) eta(i) = Rational(d(rng), den(rng));
      const Rational top = fujiki_top(F, eta);
      if (top == 0) continue;
      exact_ratios.insert(fujiki_polarized_bruteforce(F, std::vector<RatVector>(2 * n, eta)) / top);
    }
    o.detail << "n=" << n << " constant " << hi.convert_to<double>() << " spread " << spread << " (exact: "
             << exact_ratios.size() << " distinct); ";
    o.require(spread < kFujikiSpread, "Fujiki constant varies with eta");
    o.require(exact_ratios.size() == 1, "exact Fujiki constant varies with eta");
  }
}

// ---- 6 ----
HermitianForm::Mat random_pd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  HermitianForm::Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = {g(rng), g(rng)};
  return b * b.adjoint() + 0.1 * HermitianForm::Mat::Identity(n, n);
}

void amgm(Outcome& o) {
  using Mat = HermitianForm::Mat;
  std::mt19937_64 rng(66);
  std::normal_distribution<double> g;
  int counterexamples = 0, premise_met = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 4;
    const HermitianForm h2(random_pd(rng, n));
    Mat m1;
    if (t % 2 == 0) {
      m1 = random_pd(rng, n);
    } else {
      // near the premise: H2^{1/2}(I + D)H2^{1/2} with traceless D
      Mat D(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D(i, j) = {g(rng), g(rng)};
      D = (D + D.adjoint()).eval();
      D -= (D.trace() / double(n)) * Mat::Identity(n, n);
      D *= std::pow(10.0, -1 - static_cast<double>(t % 7)) / D.cwiseAbs().maxCoeff();
      const Mat L = h2.cholesky().matrixL();
      m1 = L * (Mat::Identity(n, n) + D) * L.adjoint();
    }
    const auto r = amgm_rigidity_check(HermitianForm(m1), h2, kAmgmTol);
    counterexamples += r.verdict == RigidityVerdict::Counterexample;
    premise_met += r.verdict == RigidityVerdict::Equal;
  }
  o.detail << counterexamples << " counterexamples in 1000 pairs (" << premise_met << " met the premise); ";
  o.require(counterexamples == 0, "Counterexample verdict");

  int equal = 0;
  for (int t = 0; t < 100; ++t) {
    const HermitianForm h(random_pd(rng, 2 + t % 4));
    equal += amgm_rigidity_check(h, h, kAmgmTol).verdict == RigidityVerdict::Equal;
  }
  int violated = 0;
  double worst_mean = 0;
  for (int t = 0; t < 100; ++t) {
    const double lambda = std::uniform_real_distribution<double>(1.01, 20)(rng);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = lambda;
    d(1, 1) = 1 / lambda;
    const auto r = amgm_rigidity_check(HermitianForm(d), HermitianForm(Mat::Identity(2, 2)), kAmgmTol);
    violated += r.verdict == RigidityVerdict::PremiseViolated;
    worst_mean = std::max(worst_mean, std::abs(r.ratios.mean - (lambda + 1 / lambda) / 2));
  }
  o.detail << equal << "/100 equal pairs Equal, " << violated << "/100 diag pairs PremiseViolated, mean error "
           << worst_mean << "; ";
  o.require(equal == 100, "equal pair not Equal");
  o.require(violated == 100, "diag pair not PremiseViolated");
  o.require(worst_mean < kMeanTol, "mean of diag pair");
}

// ---- 7 ----
void k3_kernel(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Surface222 S = Surface222::reference();
  RngStream rng(7777);
  double res = 0, back = 0, anti = 0, meas = 0;
  long skipped = 0, fiber_breaks = 0, checks = 0;
  for (int i = 0; i < 1000; ++i) {
    const SurfacePoint p = sample_point(S, rng);
    res = std::max(res, p.residual);
    const std::array<int, 3> ch{p.c[0].chart(), p.c[1].chart(), p.c[2].chart()};
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
      ++checks;
      try {
        const SurfacePoint once = involution(S, ax, p), twice = involution(S, ax, once);
        res = std::max({res, once.residual, twice.residual});
        back = std::max(back, point_distance(twice, p));
        const cd f1 = S.affine_partial(p.c, ax, ch), f2 = S.affine_partial(once.c, ax, ch);
        anti = std::max(anti, std::abs(f1 + f2) / std::max(1.0, std::abs(f1)));
        for (Axis other : {Axis::X, Axis::Y, Axis::Z})
          if (other != ax && !(once[other] == p[other])) ++fiber_breaks;
        const SurfaceMap sig = [&](const SurfacePoint& q) { return involution(S, ax, q); };
        meas = std::max(meas, std::abs(measure_ratio(S, sig, p) - 1));
      } catch (const BranchPointError&) {
        ++skipped;
      }
    }
    for (const char* name : {"yz", "xz", "xy"}) {
      ++checks;
      const AxisPair pair = parse_pair(name);
      try {
        const SurfacePoint q = parabolic_map(S, pair, p);
        res = std::max(res, q.residual);
        if (!(q[pair.fixed()] == p[pair.fixed()])) ++fiber_breaks;
        const SurfaceMap f = [&](const SurfacePoint& x) { return parabolic_map(S, pair, x); };
        meas = std::max(meas, std::abs(measure_ratio(S, f, p) - 1));
      } catch (const BranchPointError&) {
        ++skipped;
      }
    }
  }
  const auto smooth = smoothness_probe(S, 1000000, 7777);
  const double t = seconds_since(t0);
  o.detail << "smoothness: " << smooth.suspicious << " suspicious of " << smooth.samples << " (min |grad| "
           << smooth.min_gradient << "), ";
  o.detail << "residual " << res << ", sigma^2 " << back << ", anti-symplectic " << anti << ", measure " << meas
           << ", fiber breaks " << fiber_breaks << ", branch skips " << skipped << "/" << checks << ", " << t
           << " s; ";
  o.require(smooth.suspicious == 0, "reference surface looks singular");
  o.require(res < kResidual, "residual");
  o.require(back < kInvolution, "sigma^2 = id");
  o.require(anti < kAntiSymplectic, "anti-symplectic sign");
  o.require(fiber_breaks == 0, "fibration coordinate changed");
  o.require(meas < kMeasure, "measure pullback");
  o.require(skipped * 100 < checks, "too many branch points");
  o.require(t < kKernelSeconds, "too slow");
}

// ---- 8 ----
void density(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Surface222 S = Surface222::reference();
  const AxisPair pair = parse_pair("yz");
  RngStream rng(8888);
  FiberOptions options;
  options.grids = {16};
  int good = 0;
  double lo = 1;
  for (int f = 0; f < 20; ++f) {
    const ProjCoord base = ProjCoord::normalized(rng.complex_normal(), rng.complex_normal());
    const SurfacePoint start = sample_on_fiber(S, pair.fixed(), base, rng);
    const auto rep = fiber_orbit(S, pair, start, 100000, options);
    const double c = rep.grids[0].coverage;
    lo = std::min(lo, c);
    good += c >= kCoverageThreshold;
  }
  const double t = seconds_since(t0);
  o.detail << good << "/20 fibers reach coverage " << kCoverageThreshold << " (lowest " << lo << "), " << t << " s; ";
  o.require(good >= kFiberFraction * 20, "too few dense-looking fibers");
  o.require(t < kDensitySeconds, "too slow");
}

// ---- 9 ----
void ergodicity(Outcome& o) {
  const Surface222 S = Surface222::reference();
  ErgodicityOptions opt;
  opt.word_length = 10000;
  opt.trials = 16;
  opt.mc_samples = 1000000;
  opt.seed = 9999;
  o.detail << ErgodicityReport::kLabel << ": ";
  for (TestFunction f : {TestFunction::BX, TestFunction::BYBZ, TestFunction::ReX}) {
    const auto r = birkhoff_ergodicity_test(S, f, opt);
    o.detail << to_string(f) << " time " << r.time_mean << " space " << r.space.mean << " z " << r.z_score << "; ";
    o.require(r.passed, "Birkhoff test for " + to_string(f));
  }
  const auto c = single_parabolic_contrast(S, parse_pair("yz"), TestFunction::BY, 8, 8, 10000, 9999, 1);
  o.detail << "single-map contrast ratio " << c.ratio << "; ";
  o.require(c.ratio >= kContrastRatio, "single-map contrast");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 trichotomy", trichotomy},     {"2 seed lattices", seed_grid}, {"3 parabolic constructor", transvections},
      {"4 rational hull", hulls},       {"5 hafnian/fujiki", hafnian_fujiki}, {"6 am-gm rigidity", amgm},
      {"7 k3 kernel", k3_kernel},       {"8 density diagnostic", density}, {"9 ergodicity diagnostic", ergodicity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
