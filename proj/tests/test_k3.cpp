#include "doctest.h"

#include "plab/k3.hpp"

#include <cmath>

using namespace plab;

namespace {

const Surface222& ref() {
  static const Surface222 s = Surface222::reference();
  return s;
}

// Point where the z-quadratic has a double root: Newton on the discriminant in y.
SurfacePoint branch_point(const Surface222& S, RngStream& rng) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::array<ProjCoord, 3> c{ProjCoord::normalized(rng.complex_normal(), 1.0), ProjCoord{}, ProjCoord{}};
    cd y = rng.complex_normal() * 0.5;
    auto disc = [&](cd t) {
      c[1] = ProjCoord{t, 1.0};
      return S.axis_quadratic(c, Axis::Z).discriminant();
    };
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const cd d = disc(y), dd = (disc(y + 1e-7) - disc(y - 1e-7)) / 2e-7;
      if (std::abs(dd) == 0) break;
      y -= d / dd;
      if (std::abs(disc(y)) < 1e-14) {
        ok = true;
        break;
      }
    }
    if (!ok || std::abs(y) > 1) continue;
    c[1] = ProjCoord::normalized(y, 1.0);
    const auto q = S.axis_quadratic(c, Axis::Z);
    c[2] = ProjCoord::normalized(-q.B, 2.0 * q.A);
    return make_point(S, c);
  }
  throw std::runtime_error("no branch point found");
}

}  // namespace

TEST_SUITE("k3") {

TEST_CASE("evaluation and sampling") {
  const auto fermat = Surface222::fermat_like();
  const auto on = make_point(fermat, {ProjCoord{0.0, 1.0}, ProjCoord{0.0, 1.0}, ProjCoord{1.0, 1.0}});
  CHECK(std::abs(eval_f(fermat, on)) == 0.0);
  const auto off = make_point(fermat, {ProjCoord{0.0, 1.0}, ProjCoord{0.0, 1.0}, ProjCoord{0.5, 1.0}});
  CHECK(off.residual > 0.5);

  RngStream rng(1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_point(ref(), rng);
    worst = std::max(worst, p.residual);
    for (const auto& c : p.c) CHECK(std::abs(std::max(std::abs(c.u), std::abs(c.v)) - 1) < 1e-15);
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(Surface222(std::array<cd, 27>{}), PreconditionError);
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  RngStream u(7);
  double m = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    CHECK((v >= 0 && v < 1));
    m += v;
  }
  CHECK(std::abs(m / 100000 - 0.5) < 0.01);
}

TEST_CASE("involutions") {
  const auto fermat = Surface222::fermat_like();
  const auto p = make_point(fermat, {ProjCoord{0.3, 1.0}, ProjCoord{0.2, 1.0}, ProjCoord{0.0, 1.0}});
  // z^2 = 1 - 0.09 - 0.04
  const auto q = make_point(fermat, {p.c[0], p.c[1], ProjCoord::normalized(std::sqrt(0.87), 1.0)});
  const auto s = involution(fermat, Axis::Z, q);
  CHECK(s[Axis::X] == q[Axis::X]);
  CHECK(s[Axis::Y] == q[Axis::Y]);
  CHECK(std::abs(s[Axis::Z].affine(0) + std::sqrt(0.87)) < 1e-14);

  RngStream rng(2);
  double worst_back = 0, worst_res = 0, worst_anti = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto pt = sample_point(ref(), rng);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
      SurfacePoint once, twice;
      try {
        once = involution(ref(), ax, pt);
        twice = involution(ref(), ax, once);
      } catch (const BranchPointError&) {
        continue;
      }
      worst_back = std::max(worst_back, point_distance(twice, pt));
      worst_res = std::max({worst_res, once.residual, twice.residual});
      // F_t at the two roots, in one chart
      std::array<int, 3> ch{pt.c[0].chart(), pt.c[1].chart(), pt.c[2].chart()};
      const cd f1 = ref().affine_partial(pt.c, ax, ch), f2 = ref().affine_partial(once.c, ax, ch);
      worst_anti = std::max(worst_anti, std::abs(f1 + f2) / std::max(1.0, std::abs(f1)));
    }
  }
  CHECK(worst_back < 1e-9);
  CHECK(worst_res < 1e-10);
  CHECK(worst_anti < 1e-9);
  MESSAGE("sigma^2 " << worst_back << " residual " << worst_res << " anti " << worst_anti);

  RngStream brng(3);
  const auto bp = branch_point(ref(), brng);
  CHECK(bp.residual < 1e-10);
  CHECK_THROWS_AS(involution(ref(), Axis::Z, bp), BranchPointError);
}

TEST_CASE("parabolic maps preserve their fibration") {
  RngStream rng(4);
  for (const auto& pair : {parse_pair("yz"), parse_pair("xz"), parse_pair("x,y")}) {
    double worst = 0;
    for (int i = 0; i < 300; ++i) {
      const auto p = sample_point(ref(), rng);
      SurfacePoint img, back;
      try {
        img = parabolic_map(ref(), pair, p);
        back = parabolic_inverse(ref(), pair, img);
      } catch (const BranchPointError&) {
        continue;
      }
      CHECK(img[pair.fixed()] == p[pair.fixed()]);
      worst = std::max(worst, point_distance(back, p));
    }
    CHECK(worst < 1e-9);
  }
  CHECK_THROWS_AS(parse_pair("xx"), PreconditionError);
  CHECK(parse_pair("yz").fixed() == Axis::X);
}

TEST_CASE("fiber 1-form: translation for p, sign -1 for an involution") {
  RngStream rng(5);
  int checked = 0;
  double worst = 0, worst_inv = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p = sample_point(ref(), rng);
    for (const auto& pair : {parse_pair("yz"), parse_pair("xz"), parse_pair("xy")}) {
      try {
        const auto t = translation_check(ref(), pair, p, 1e-6);
        worst = std::max(worst, t.deviation);
        const SurfaceMap sig = [&](const SurfacePoint& q) { return involution(ref(), pair.second, q); };
        worst_inv = std::max(worst_inv, std::abs(form_ratio(ref(), pair.fixed(), sig, p) + 1.0));
        ++checked;
      } catch (const BranchPointError&) {
      }
    }
  }
  MESSAGE("translation deviation " << worst << " involution " << worst_inv << " over " << checked);
  CHECK(checked > 500);
  CHECK(worst < 1e-6);
  CHECK(worst_inv < 1e-6);
}

TEST_CASE("volume form pulls back to itself") {
  RngStream rng(6);
  double worst = 0;
  int n = 0;
  for (int i = 0; i < 300; ++i) {
    const auto p = sample_point(ref(), rng);
    for (const auto& pair : {parse_pair("yz"), parse_pair("xz"), parse_pair("xy")}) {
      try {
        const SurfaceMap m = [&](const SurfacePoint& q) { return parabolic_map(ref(), pair, q); };
        worst = std::max(worst, std::abs(measure_ratio(ref(), m, p) - 1));
        const SurfaceMap s = [&](const SurfacePoint& q) { return involution(ref(), pair.first, q); };
        worst = std::max(worst, std::abs(measure_ratio(ref(), s, p) - 1));
        ++n;
      } catch (const BranchPointError&) {
      }
    }
  }
  MESSAGE("measure deviation " << worst << " over " << n);
  CHECK(worst < 1e-6);
}

TEST_CASE("fiber orbit coverage") {
  RngStream rng(7);
  const auto start = sample_on_fiber(ref(), Axis::X, ProjCoord::normalized(cd(0.3, 0.17), 1.0), rng);
  FiberOptions opt;
  opt.grids = {4, 8};
  const auto zero = fiber_orbit(ref(), parse_pair("yz"), start, 0, opt);
  CHECK(zero.grids[0].occupied == 1);
  const auto rep = fiber_orbit(ref(), parse_pair("yz"), start, 20000, opt);
  for (const auto& g : rep.grids) {
    CHECK(g.coverage >= 0);
    CHECK(g.coverage <= 1);
    MESSAGE("G=" << g.grid << " occupied " << g.occupied << " adjacent " << g.adjacent << " coverage " << g.coverage);
  }
  REQUIRE(rep.checkpoints.size() == 10);
  for (size_t i = 1; i < rep.checkpoints.size(); ++i) CHECK(rep.checkpoints[i].second >= rep.checkpoints[i - 1].second);
  CHECK(rep.checkpoints.back().first == 20000);
  CHECK(rep.grids[0].coverage > 0.9);
}

TEST_CASE("coverage separates real fibers from generic ones") {
  // real coefficients and a real base: the translation is real, the orbit closure a circle
  RngStream rng(12);
  FiberOptions opt;
  opt.grids = {16};
  const auto real = sample_on_fiber(ref(), Axis::X, ProjCoord::normalized(cd(0.3, 0), 1.0), rng);
  const auto generic = sample_on_fiber(ref(), Axis::X, ProjCoord::normalized(cd(0.3, 0.17), 1.0), rng);
  const auto r = fiber_orbit(ref(), parse_pair("yz"), real, 50000, opt);
  const auto g = fiber_orbit(ref(), parse_pair("yz"), generic, 50000, opt);
  MESSAGE("real " << r.grids[0].coverage << " generic " << g.grids[0].coverage);
  CHECK(r.grids[0].coverage < 0.2);
  CHECK(g.grids[0].coverage > 0.95);
  CHECK(g.grids[0].adjacent <= g.grids[0].met);
  CHECK(g.grids[0].occupied <= g.grids[0].visited);
}

TEST_CASE("Birkhoff diagnostic") {
  ErgodicityOptions opt;
  opt.word_length = 2000;
  opt.trials = 8;
  opt.burn_in = 200;
  opt.mc_samples = 60000;
  opt.seed = 9;
  const auto one = birkhoff_ergodicity_test(ref(), TestFunction::One, opt);
  CHECK(one.time_mean == 1.0);
  CHECK(one.space.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.passed);
  const auto bx = birkhoff_ergodicity_test(ref(), TestFunction::BX, opt);
  MESSAGE("bx time " << bx.time_mean << " +- " << bx.time_stderr << " space " << bx.space.mean << " +- "
                     << bx.space.stderr_ << " z " << bx.z_score);
  CHECK(bx.passed);

  const auto a = space_average(ref(), TestFunction::BYBZ, 20000, 5, 1);
  const auto b = space_average(ref(), TestFunction::BYBZ, 20000, 5, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);

  const auto c = single_parabolic_contrast(ref(), parse_pair("yz"), TestFunction::BY, 4, 3, 2000, 11, 2);
  MESSAGE("contrast cross " << c.cross_fiber_variance << " within " << c.within_fiber_variance);
  CHECK(c.ratio >= 10);
}

TEST_CASE("smoothness probe and free-group sanity") {
  const auto probe = smoothness_probe(ref(), 5000, 13);
  CHECK(probe.suspicious == 0);
  MESSAGE("min gradient " << probe.min_gradient);
  const auto fg = free_group_sanity(ref(), 500, 8, 17);
  CHECK(fg.words == 500);
  CHECK(fg.fixed == 0);
}

}
