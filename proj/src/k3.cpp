#include "plab/k3.hpp"

#include "plab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace plab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kReferenceSeed = 222;

std::array<cd, 3> monomials(const ProjCoord& p) { return {p.v * p.v, p.u * p.v, p.u * p.u}; }
std::array<cd, 3> monomials_du(const ProjCoord& p) { return {0.0, p.v, 2.0 * p.u}; }
std::array<cd, 3> monomials_dv(const ProjCoord& p) { return {2.0 * p.v, p.u, 0.0}; }

int idx(Axis a) { return static_cast<int>(a); }

std::array<Axis, 2> others(Axis fixed) {
  switch (fixed) {
    case Axis::X:
      return {Axis::Y, Axis::Z};
    case Axis::Y:
      return {Axis::X, Axis::Z};
    case Axis::Z:
      break;
  }
  return {Axis::X, Axis::Y};
}

std::array<int, 3> charts_of(const SurfacePoint& p) { return {p.c[0].chart(), p.c[1].chart(), p.c[2].chart()}; }

// Root of the `axis` quadratic at p closest to `near`.
ProjCoord solve_near(const Surface222& S, const std::array<ProjCoord, 3>& p, Axis axis, const ProjCoord& near) {
  const auto roots = S.axis_quadratic(p, axis).roots();
  return roots[0].distance(near) <= roots[1].distance(near) ? roots[0] : roots[1];
}

double fs_density(cd t) {
  const double r = 1 + std::norm(t);
  return 1.0 / (kPi * r * r);
}

double height(const ProjCoord& p) {
  const double a = std::norm(p.u), b = std::norm(p.v);
  return a / (a + b);
}

ProjCoord random_fs(RngStream& rng) { return ProjCoord::normalized(rng.complex_normal(), rng.complex_normal()); }

}  // namespace

ProjCoord ProjCoord::normalized(cd u, cd v) {
  const double m = std::max(std::abs(u), std::abs(v));
  if (!(m > 0) || !std::isfinite(m)) throw NumericalContractError("degenerate projective coordinate");
  return {u / m, v / m};
}

ProjCoord ProjCoord::from_affine(int in_chart, cd t) {
  return in_chart == 0 ? normalized(t, 1.0) : normalized(1.0, t);
}

double ProjCoord::distance(const ProjCoord& o) const {
  const double n1 = std::sqrt(std::norm(u) + std::norm(v)), n2 = std::sqrt(std::norm(o.u) + std::norm(o.v));
  return std::abs(u * o.v - v * o.u) / (n1 * n2);
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw PreconditionError("unknown axis '" + s + "'");
}

Axis AxisPair::fixed() const {
  if (first == second) throw PreconditionError("a parabolic pair needs two distinct axes");
  return static_cast<Axis>(3 - idx(first) - idx(second));
}

std::string to_string(AxisPair p) { return to_string(p.first) + to_string(p.second); }

AxisPair parse_pair(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != ',' && c != '(' && c != ')' && c != ' ') t.push_back(c);
  if (t.size() != 2) throw PreconditionError("pair must name two axes, e.g. yz");
  AxisPair p{parse_axis(t.substr(0, 1)), parse_axis(t.substr(1, 1))};
  p.fixed();
  return p;
}

std::array<ProjCoord, 2> AxisQuadratic::roots() const {
  const cd sq = std::sqrt(discriminant());
  const cd q1 = -(B + sq) / 2.0, q2 = -(B - sq) / 2.0;
  const cd q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
  if (std::abs(q) == 0 && std::abs(A) == 0 && std::abs(C) == 0)
    throw BranchPointError("the quadratic vanishes identically");
  if (std::abs(q) == 0) {
    // B = 0 and A C = 0: a double root at 0 or infinity
    const ProjCoord r = std::abs(A) == 0 ? ProjCoord{1.0, 0.0} : ProjCoord{0.0, 1.0};
    return {r, r};
  }
  return {ProjCoord::normalized(q, A), ProjCoord::normalized(C, q)};
}

Surface222::Surface222(std::array<cd, 27> coeffs, std::uint64_t seed) : coeffs_(coeffs), seed_(seed) {
  // each variable must appear squared somewhere
  for (int axis = 0; axis < 3; ++axis) {
    bool found = false;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int e[3][3] = {{2, i, j}, {i, 2, j}, {i, j, 2}};
        if (std::abs(coeff(e[axis][0], e[axis][1], e[axis][2])) > 0) found = true;
      }
    if (!found) throw PreconditionError("surface is degenerate in " + to_string(static_cast<Axis>(axis)));
  }
}

Surface222 Surface222::random_real(std::uint64_t seed) {
  RngStream rng(seed);
  std::array<cd, 27> c;
  for (auto& v : c) v = 2 * rng.uniform() - 1;
  return {c, seed};
}

Surface222 Surface222::reference() { return random_real(kReferenceSeed); }

Surface222 Surface222::fermat_like() {
  std::array<cd, 27> c{};
  c[2 * 9] = 1;
  c[2 * 3] = 1;
  c[2] = 1;
  c[0] = -1;
  return {c, 0};
}

cd Surface222::eval(const std::array<ProjCoord, 3>& p) const {
  const auto mx = monomials(p[0]), my = monomials(p[1]), mz = monomials(p[2]);
  cd s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const cd xy = mx[i] * my[j];
      for (int k = 0; k < 3; ++k) s += coeffs_[i * 9 + j * 3 + k] * xy * mz[k];
    }
  return s;
}

cd Surface222::affine_partial(const std::array<ProjCoord, 3>& p, Axis axis, const std::array<int, 3>& charts) const {
  std::array<std::array<cd, 3>, 3> m;
  for (int a = 0; a < 3; ++a) {
    const ProjCoord h = charts[a] == 0 ? ProjCoord{p[a].affine(0), 1.0} : ProjCoord{1.0, p[a].affine(1)};
    if (a == idx(axis))
      m[a] = charts[a] == 0 ? monomials_du(h) : monomials_dv(h);
    else
      m[a] = monomials(h);
  }
  cd s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += coeffs_[i * 9 + j * 3 + k] * m[0][i] * m[1][j] * m[2][k];
  return s;
}

AxisQuadratic Surface222::axis_quadratic(const std::array<ProjCoord, 3>& p, Axis axis) const {
  const auto [a, b] = others(axis);
  const auto ma = monomials(p[idx(a)]), mb = monomials(p[idx(b)]);
  std::array<cd, 3> w{0.0, 0.0, 0.0};  // by power of the axis variable
  for (int e = 0; e < 3; ++e)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int ex[3];
        ex[idx(axis)] = e;
        ex[idx(a)] = i;
        ex[idx(b)] = j;
        w[e] += coeff(ex[0], ex[1], ex[2]) * ma[i] * mb[j];
      }
  return {w[2], w[1], w[0]};
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : state_(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1))) {
  next();
}

std::uint64_t RngStream::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2 * std::log(u1));
  spare_ = r * std::sin(2 * kPi * u2);
  has_spare_ = true;
  return r * std::cos(2 * kPi * u2);
}

cd RngStream::complex_normal() {
  const double a = normal();
  return {a, normal()};
}

cd eval_f(const Surface222& S, const SurfacePoint& p) { return S.eval(p.c); }

SurfacePoint make_point(const Surface222& S, std::array<ProjCoord, 3> c) {
  SurfacePoint p{c, 0};
  for (auto& x : p.c) x = ProjCoord::normalized(x.u, x.v);
  p.residual = std::abs(S.eval(p.c));
  return p;
}

SurfacePoint sample_point(const Surface222& S, RngStream& rng, int max_retries) {
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::array<ProjCoord, 3> c{random_fs(rng), random_fs(rng), ProjCoord{}};
    const auto q = S.axis_quadratic(c, Axis::Z);
    const double s = q.scale();
    if (!(s > 0) || std::abs(q.discriminant()) < kBranchThreshold * s * s) continue;
    const auto roots = q.roots();
    c[2] = roots[rng.uniform() < 0.5 ? 0 : 1];
    return make_point(S, c);
  }
  throw NumericalContractError("sample_point: too many degenerate draws");
}

SurfacePoint sample_on_fiber(const Surface222& S, Axis fixed, const ProjCoord& base, RngStream& rng, int max_retries) {
  const auto [a, b] = others(fixed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::array<ProjCoord, 3> c;
    c[idx(fixed)] = base;
    c[idx(a)] = random_fs(rng);
    const auto q = S.axis_quadratic(c, b);
    const double s = q.scale();
    if (!(s > 0) || std::abs(q.discriminant()) < kBranchThreshold * s * s) continue;
    // also stay off the branch locus of the other covering
    const auto roots = q.roots();
    c[idx(b)] = roots[rng.uniform() < 0.5 ? 0 : 1];
    const auto qa = S.axis_quadratic(c, a);
    const double sa = qa.scale();
    if (!(sa > 0) || std::abs(qa.discriminant()) < kBranchThreshold * sa * sa) continue;
    return make_point(S, c);
  }
  throw NumericalContractError("sample_on_fiber: too many degenerate draws");
}

SurfacePoint involution(const Surface222& S, Axis axis, const SurfacePoint& p) {
  const auto Q = S.axis_quadratic(p.c, axis);
  const double scale = Q.scale();
  if (!(scale > 0)) throw BranchPointError("the fiber line lies in the surface");
  if (std::abs(Q.discriminant()) < kBranchThreshold * scale * scale)
    throw BranchPointError("too close to the branch locus of sigma_" + to_string(axis));
  const cd u1 = p[axis].u, v1 = p[axis].v;
  // Three forms of the other root: product of roots, sum in t = u/v, sum in s = v/u.
  const std::array<std::array<cd, 2>, 3> candidates{{{Q.C * v1, Q.A * u1},
                                                     {-Q.B * v1 - Q.A * u1, Q.A * v1},
                                                     {Q.C * u1, -Q.B * u1 - Q.C * v1}}};
  double best = INFINITY;
  ProjCoord root;
  for (const auto& cand : candidates) {
    if (std::max(std::abs(cand[0]), std::abs(cand[1])) < 1e-300) continue;
    const ProjCoord r = ProjCoord::normalized(cand[0], cand[1]);
    const double res = std::abs(Q.eval(r));
    if (res < best) {
      best = res;
      root = r;
    }
  }
  if (!std::isfinite(best)) throw BranchPointError("no usable root swap");
  // one Newton step in the chart with |t| <= 1
  const int chart = root.chart();
  cd t = root.affine(chart);
  const cd a2 = chart == 0 ? Q.A : Q.C, a0 = chart == 0 ? Q.C : Q.A;
  const cd g = a2 * t * t + Q.B * t + a0, dg = 2.0 * a2 * t + Q.B;
  if (std::abs(dg) > 0) t -= g / dg;
  SurfacePoint out = p;
  out[axis] = ProjCoord::from_affine(chart, t);
  out.residual = std::abs(S.eval(out.c));
  if (!(out.residual < kResidualLimit)) throw NumericalContractError("point left the surface after an involution");
  return out;
}

SurfacePoint parabolic_map(const Surface222& S, AxisPair pair, const SurfacePoint& p) {
  pair.fixed();
  return involution(S, pair.second, involution(S, pair.first, p));
}

SurfacePoint parabolic_inverse(const Surface222& S, AxisPair pair, const SurfacePoint& p) {
  pair.fixed();
  return involution(S, pair.first, involution(S, pair.second, p));
}

double point_distance(const SurfacePoint& a, const SurfacePoint& b) {
  double d = 0;
  for (int i = 0; i < 3; ++i) d = std::max(d, a.c[i].distance(b.c[i]));
  return d;
}

namespace {

// Fiber parametrization at a point: parameter axis, solved axis, and the sign making
// s dP / F_Q the same global 1-form in every chart.
struct FiberChart {
  Axis param, solved;
  double sign;
  std::array<int, 3> charts;
};

FiberChart fiber_chart(const Surface222& S, Axis fixed, const SurfacePoint& p) {
  const auto [a, b] = others(fixed);
  FiberChart fc{a, b, 1.0, charts_of(p)};
  const double eps = (fc.charts[idx(a)] + fc.charts[idx(b)]) % 2 == 0 ? 1.0 : -1.0;
  const cd fa = S.affine_partial(p.c, a, fc.charts), fb = S.affine_partial(p.c, b, fc.charts);
  if (std::max(std::abs(fa), std::abs(fb)) < 1e-12) throw BranchPointError("the fiber is singular here");
  if (std::abs(fb) >= std::abs(fa)) {
    fc.sign = eps;  // omega = eps da / F_b
  } else {
    fc.param = b;
    fc.solved = a;
    fc.sign = -eps;  // omega = -eps db / F_a
  }
  return fc;
}

SurfacePoint shift(const Surface222& S, const SurfacePoint& p, Axis param, int chart, cd delta, Axis solved) {
  std::array<ProjCoord, 3> c = p.c;
  c[idx(param)] = ProjCoord::from_affine(chart, p[param].affine(chart) + delta);
  c[idx(solved)] = solve_near(S, c, solved, p[solved]);
  return make_point(S, c);
}

}  // namespace

cd form_ratio(const Surface222& S, Axis fixed, const SurfaceMap& map, const SurfacePoint& p, double h) {
  if (!(h > 1e-12)) throw PreconditionError("derivative step too small");
  const FiberChart src = fiber_chart(S, fixed, p);
  const SurfacePoint img = map(p);
  if (!(img[fixed] == p[fixed])) throw PreconditionError("map does not preserve the fiber");
  const FiberChart tgt = fiber_chart(S, fixed, img);
  const int cs = src.charts[idx(src.param)], ct = tgt.charts[idx(tgt.param)];
  const SurfacePoint plus = map(shift(S, p, src.param, cs, h, src.solved));
  const SurfacePoint minus = map(shift(S, p, src.param, cs, -h, src.solved));
  const cd diff = plus[tgt.param].affine(ct) - minus[tgt.param].affine(ct);
  if (std::abs(diff) == 0) throw NumericalContractError("derivative step underflow");
  const cd deriv = diff / (2 * h);
  const cd f_src = S.affine_partial(p.c, src.solved, src.charts);
  const cd f_tgt = S.affine_partial(img.c, tgt.solved, tgt.charts);
  return (tgt.sign / src.sign) * deriv * f_src / f_tgt;
}

TranslationCheck translation_check(const Surface222& S, AxisPair pair, const SurfacePoint& p, double tol, double h) {
  const SurfaceMap map = [&](const SurfacePoint& q) { return parabolic_map(S, pair, q); };
  TranslationCheck out;
  out.ratio = form_ratio(S, pair.fixed(), map, p, h);
  out.deviation = std::abs(out.ratio - 1.0);
  out.passed = out.deviation < tol;
  return out;
}

double measure_ratio(const Surface222& S, const SurfaceMap& map, const SurfacePoint& p, double h) {
  if (!(h > 1e-12)) throw PreconditionError("derivative step too small");
  // Project away the coordinate with the largest partial.
  auto best_third = [&](const SurfacePoint& q, const std::array<int, 3>& ch) {
    int best = 0;
    double mag = -1;
    for (int a = 0; a < 3; ++a) {
      const double m = std::abs(S.affine_partial(q.c, static_cast<Axis>(a), ch));
      if (m > mag) {
        mag = m;
        best = a;
      }
    }
    return static_cast<Axis>(best);
  };
  const auto cs = charts_of(p);
  const Axis c = best_third(p, cs);
  const SurfacePoint img = map(p);
  const auto ct = charts_of(img);
  const Axis c2 = best_third(img, ct);
  const auto src = others(c), tgt = others(c2);

  cd J[2][2];
  for (int col = 0; col < 2; ++col) {
    const Axis param = src[col];
    const SurfacePoint plus = map(shift(S, p, param, cs[idx(param)], h, c));
    const SurfacePoint minus = map(shift(S, p, param, cs[idx(param)], -h, c));
    for (int row = 0; row < 2; ++row) {
      const Axis out_axis = tgt[row];
      J[row][col] = (plus[out_axis].affine(ct[idx(out_axis)]) - minus[out_axis].affine(ct[idx(out_axis)])) / (2 * h);
    }
  }
  const double det2 = std::norm(J[0][0] * J[1][1] - J[0][1] * J[1][0]);
  const double fs = std::norm(S.affine_partial(p.c, c, cs)), ft = std::norm(S.affine_partial(img.c, c2, ct));
  return det2 * fs / ft;
}

std::array<double, 2> equal_area(const ProjCoord& p) {
  double a = std::arg(p.u * std::conj(p.v)) / (2 * kPi);
  if (a < 0) a += 1;
  if (a >= 1) a -= 1;
  return {a, height(p)};
}

namespace {

class CellGrid {
 public:
  explicit CellGrid(int g) : g_(g), bits_(static_cast<size_t>(g) * g * g * g, false) {}
  size_t cell(const ProjCoord& a, const ProjCoord& b) const {
    const auto ea = equal_area(a), eb = equal_area(b);
    size_t idx = 0;
    for (double v : {ea[0], ea[1], eb[0], eb[1]}) {
      const int k = std::clamp(static_cast<int>(v * g_), 0, g_ - 1);
      idx = idx * static_cast<size_t>(g_) + static_cast<size_t>(k);
    }
    return idx;
  }
  bool mark(size_t c) {
    if (bits_[c]) return false;
    bits_[c] = true;
    ++count_;
    return true;
  }
  bool test(size_t c) const { return bits_[c]; }
  long count() const { return count_; }
  size_t size() const { return bits_.size(); }

 private:
  int g_;
  std::vector<bool> bits_;
  long count_ = 0;
};

ProjCoord from_equal_area(double a, double b) {
  const cd u = std::polar(std::sqrt(b), 2 * kPi * a);
  return ProjCoord::normalized(u, std::sqrt(1 - b));
}

}  // namespace

FiberOrbitReport fiber_orbit(const Surface222& S, AxisPair pair, const SurfacePoint& start, long N,
                             const FiberOptions& options) {
  if (N < 0) throw PreconditionError("N must be nonnegative");
  if (options.grids.empty()) throw PreconditionError("need at least one grid");
  for (int g : options.grids)
    if (g < 1 || g > 64) throw PreconditionError("grid resolution must be in [1, 64]");
  const Axis fixed = pair.fixed();
  const auto [a, b] = others(fixed);
  FiberOrbitReport rep;
  rep.pair = pair;
  rep.base = start[fixed];
  rep.start = start;
  rep.N = N;

  std::vector<CellGrid> visited, mesh, heavy;
  for (int g : options.grids) {
    visited.emplace_back(g);
    mesh.emplace_back(g);
    heavy.emplace_back(g);
  }
  std::vector<long> heavy_hits(options.grids.size(), 0);
  auto visit = [&](const SurfacePoint& p) {
    for (size_t gi = 0; gi < visited.size(); ++gi) {
      const size_t c = visited[gi].cell(p[a], p[b]);
      if (visited[gi].mark(c) && heavy[gi].test(c)) ++heavy_hits[gi];
    }
  };

  // Dense mesh of the fiber, parametrized by each of the two coordinates in turn. Mesh samples
  // are equally spaced in Fubini-Study area, so the invariant area |dt / F_s|^2 of a sample is
  // (1 + |t|^2)^2 / |F_s|^2 up to a constant; the two parametrizations are averaged.
  const int gmax = *std::max_element(options.grids.begin(), options.grids.end());
  const int m = std::max(1, options.mesh_factor) * gmax;
  std::vector<std::unordered_map<size_t, double>> mass(options.grids.size());
  for (Axis param : {a, b}) {
    const Axis solved = param == a ? b : a;
    std::vector<std::unordered_map<size_t, double>> part(options.grids.size());
    double total = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::array<ProjCoord, 3> c = start.c;
        c[idx(param)] = from_equal_area((i + 0.5) / m, (j + 0.5) / m);
        const auto q = S.axis_quadratic(c, solved);
        if (!(q.scale() > 0)) continue;
        for (const auto& r : q.roots()) {
          c[idx(solved)] = r;
          const std::array<int, 3> charts{c[0].chart(), c[1].chart(), c[2].chart()};
          const double t2 = std::norm(c[idx(param)].affine(charts[idx(param)]));
          const double fs = std::norm(S.affine_partial(c, solved, charts));
          const double w = fs > 0 ? (1 + t2) * (1 + t2) / fs : 0;
          total += std::isfinite(w) ? w : 0;
          for (size_t gi = 0; gi < mesh.size(); ++gi) {
            const size_t cell = param == a ? mesh[gi].cell(c[idx(a)], r) : mesh[gi].cell(r, c[idx(b)]);
            mesh[gi].mark(cell);
            if (std::isfinite(w)) part[gi][cell] += w;
          }
        }
      }
    if (total > 0)
      for (size_t gi = 0; gi < mesh.size(); ++gi)
        for (const auto& [cell, w] : part[gi]) mass[gi][cell] += 0.5 * w / total;
  }
  for (size_t gi = 0; gi < mesh.size(); ++gi) {
    if (mesh[gi].count() == 0) continue;
    const double cutoff = options.min_mass_ratio / static_cast<double>(mesh[gi].count());
    for (const auto& [cell, w] : mass[gi])
      if (w >= cutoff) heavy[gi].mark(cell);
  }

  const int checkpoints = std::max(0, options.checkpoints);
  const long limit = N / 1000;  // tolerated branch-point interruptions (0.1 %)
  SurfacePoint cur = start;
  visit(cur);
  int next_checkpoint = 1;
  for (long k = 1; k <= N; ++k) {
    try {
      cur = parabolic_map(S, pair, cur);
    } catch (const BranchPointError&) {
      if (++rep.interruptions > limit)
        throw NumericalContractError("too many branch-point interruptions on the fiber orbit");
      // step off the branch locus along the fiber, then continue
      const FiberChart fc = fiber_chart(S, fixed, cur);
      cur = shift(S, cur, fc.param, fc.charts[idx(fc.param)], cd(1e-6, 0), fc.solved);
      cur = parabolic_map(S, pair, cur);
    }
    visit(cur);
    while (checkpoints > 0 && next_checkpoint <= checkpoints && k == N * next_checkpoint / checkpoints) {
      rep.checkpoints.emplace_back(k, static_cast<double>(heavy_hits[0]));
      ++next_checkpoint;
    }
  }

  for (size_t gi = 0; gi < options.grids.size(); ++gi) {
    GridCoverage cov;
    cov.grid = options.grids[gi];
    cov.occupied = heavy_hits[gi];
    cov.adjacent = heavy[gi].count();
    cov.coverage = cov.adjacent > 0 ? static_cast<double>(cov.occupied) / static_cast<double>(cov.adjacent) : 0;
    long met = 0;
    for (size_t c = 0; c < visited[gi].size(); ++c)
      if (visited[gi].test(c) || mesh[gi].test(c)) ++met;
    cov.met = met;
    cov.visited = visited[gi].count();
    cov.raw_coverage = static_cast<double>(cov.visited) / static_cast<double>(met);
    rep.grids.push_back(cov);
  }
  for (auto& [k, v] : rep.checkpoints) v = rep.grids[0].adjacent > 0 ? v / static_cast<double>(rep.grids[0].adjacent) : 0;
  return rep;
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::One:
      return "one";
    case TestFunction::BX:
      return "bx";
    case TestFunction::BYBZ:
      return "by_bz";
    case TestFunction::ReX:
      return "re_x";
    case TestFunction::BY:
      return "by";
  }
  return "?";
}

TestFunction parse_test_function(const std::string& s) {
  for (TestFunction f : {TestFunction::One, TestFunction::BX, TestFunction::BYBZ, TestFunction::ReX, TestFunction::BY})
    if (to_string(f) == s) return f;
  throw PreconditionError("unknown test function '" + s + "' (one, bx, by, by_bz, re_x)");
}

double evaluate(TestFunction f, const SurfacePoint& p) {
  switch (f) {
    case TestFunction::One:
      return 1;
    case TestFunction::BX:
      return height(p[Axis::X]);
    case TestFunction::BYBZ:
      return height(p[Axis::Y]) * height(p[Axis::Z]);
    case TestFunction::ReX: {
      const auto& x = p[Axis::X];
      return std::real(x.u * std::conj(x.v)) / (std::norm(x.u) + std::norm(x.v));
    }
    case TestFunction::BY:
      return height(p[Axis::Y]);
  }
  return 0;
}

namespace {

struct RatioSums {
  double x = 0, y = 0, xx = 0, yy = 0, xy = 0;
  long n = 0;
  void add(double wx, double wy) {
    x += wx;
    y += wy;
    xx += wx * wx;
    yy += wy * wy;
    xy += wx * wy;
    ++n;
  }
  void merge(const RatioSums& o) {
    x += o.x;
    y += o.y;
    xx += o.xx;
    yy += o.yy;
    xy += o.xy;
    n += o.n;
  }
};

// Mixture density of the three projection samplers relative to |Omega|^2 at p.
double mixture_density(const Surface222& S, const SurfacePoint& p) {
  const auto ch = charts_of(p);
  std::array<double, 3> rho;
  for (int a = 0; a < 3; ++a) rho[a] = fs_density(p.c[a].affine(ch[a]));
  double q = 0;
  for (int c = 0; c < 3; ++c) {
    const auto [a, b] = others(static_cast<Axis>(c));
    q += rho[idx(a)] * rho[idx(b)] * std::norm(S.affine_partial(p.c, static_cast<Axis>(c), ch));
  }
  return q / 3;
}

constexpr int kSpaceBlocks = 64;

}  // namespace

SpaceAverage space_average(const Surface222& S, TestFunction f, long samples, std::uint64_t seed, unsigned workers) {
  if (samples < 1) throw PreconditionError("need at least one Monte Carlo sample");
  std::vector<RatioSums> blocks(kSpaceBlocks);
  parallel_for(kSpaceBlocks, workers, [&](size_t blk) {
    RngStream rng(seed, 0x5A5A0000ULL + blk);
    const long lo = samples * static_cast<long>(blk) / kSpaceBlocks;
    const long hi = samples * static_cast<long>(blk + 1) / kSpaceBlocks;
    RatioSums acc;
    for (long i = lo; i < hi; ++i) {
      const Axis third = static_cast<Axis>(i % 3);
      const auto [a, b] = others(third);
      std::array<ProjCoord, 3> c;
      c[idx(a)] = random_fs(rng);
      c[idx(b)] = random_fs(rng);
      const auto q = S.axis_quadratic(c, third);
      double wx = 0, wy = 0;
      if (q.scale() > 0) {
        for (const auto& r : q.roots()) {
          c[idx(third)] = r;
          const SurfacePoint p = make_point(S, c);
          const double w = 1.0 / mixture_density(S, p);
          wx += w;
          wy += w * evaluate(f, p);
        }
      }
      acc.add(wx, wy);
    }
    blocks[blk] = acc;
  });
  RatioSums total;
  for (const auto& b : blocks) total.merge(b);
  SpaceAverage out;
  out.samples = total.n;
  out.mean = total.y / total.x;
  const double r = out.mean;
  const double var = std::max(0.0, total.yy - 2 * r * total.xy + r * r * total.xx) / (total.x * total.x);
  out.stderr_ = std::sqrt(var);
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

ErgodicityReport birkhoff_ergodicity_test(const Surface222& S, TestFunction f, const ErgodicityOptions& options) {
  if (options.maps.empty() || options.trials < 2 || options.word_length < 1)
    throw PreconditionError("need maps, at least two trials and a positive word length");
  for (const auto& m : options.maps) m.fixed();
  ErgodicityReport rep;
  rep.f = f;
  rep.trial_means.resize(options.trials);
  std::vector<long> interruptions(options.trials, 0);
  parallel_for(options.trials, options.workers, [&](size_t t) {
    RngStream rng(options.seed, 0x7100ULL + t);
    SurfacePoint p = sample_point(S, rng);
    double sum = 0;
    const auto letters = static_cast<double>(options.maps.size());
    for (long k = 0; k < options.burn_in + options.word_length; ++k) {
      const auto letter = std::min(options.maps.size() - 1, static_cast<size_t>(rng.uniform() * letters));
      try {
        p = parabolic_map(S, options.maps[letter], p);
      } catch (const BranchPointError&) {
        ++interruptions[t];  // stay put for this step
      }
      if (k >= options.burn_in) sum += evaluate(f, p);
    }
    rep.trial_means[t] = sum / static_cast<double>(options.word_length);
  });
  for (long i : interruptions) rep.interruptions += i;
  rep.time_mean = mean_of(rep.trial_means);
  rep.time_stderr = std::sqrt(sample_variance(rep.trial_means) / options.trials);
  rep.space = space_average(S, f, options.mc_samples, options.seed ^ 0x9E3779B97F4A7C15ULL, options.workers);
  const double se = std::sqrt(rep.time_stderr * rep.time_stderr + rep.space.stderr_ * rep.space.stderr_);
  const double diff = rep.time_mean - rep.space.mean;
  rep.z_score = se > 0 ? diff / se : (std::abs(diff) < 1e-12 ? 0.0 : INFINITY);
  rep.passed = std::abs(rep.z_score) < 3;
  return rep;
}

ContrastReport single_parabolic_contrast(const Surface222& S, AxisPair map, TestFunction f, int fibers, int trials,
                                         long word_length, std::uint64_t seed, unsigned workers) {
  if (fibers < 2 || trials < 2 || word_length < 1) throw PreconditionError("need >= 2 fibers, >= 2 trials, L >= 1");
  const Axis fixed = map.fixed();
  ContrastReport rep;
  rep.map = map;
  rep.f = f;
  rep.means.assign(fibers, std::vector<double>(trials, 0));
  parallel_for(static_cast<size_t>(fibers) * trials, workers, [&](size_t job) {
    const int i = static_cast<int>(job / trials), j = static_cast<int>(job % trials);
    RngStream base_rng(seed, 0x8100ULL + i);
    const ProjCoord base = random_fs(base_rng);
    RngStream rng(seed, 0x9100ULL + job);
    SurfacePoint p = sample_on_fiber(S, fixed, base, rng);
    double sum = 0;
    for (long k = 0; k < word_length; ++k) {
      try {
        p = parabolic_map(S, map, p);
      } catch (const BranchPointError&) {
        const FiberChart fc = fiber_chart(S, fixed, p);
        p = shift(S, p, fc.param, fc.charts[idx(fc.param)], cd(1e-6, 0), fc.solved);
      }
      sum += evaluate(f, p);
    }
    rep.means[i][j] = sum / static_cast<double>(word_length);
  });
  std::vector<double> fiber_means;
  double within = 0;
  for (const auto& row : rep.means) {
    fiber_means.push_back(mean_of(row));
    within += sample_variance(row);
  }
  rep.within_fiber_variance = within / fibers;
  rep.cross_fiber_variance = sample_variance(fiber_means);
  rep.ratio = rep.within_fiber_variance > 0 ? rep.cross_fiber_variance / rep.within_fiber_variance : INFINITY;
  return rep;
}

SmoothnessProbe smoothness_probe(const Surface222& S, long samples, std::uint64_t seed, double threshold) {
  double scale = 0;
  for (const auto& c : S.coeffs()) scale = std::max(scale, std::abs(c));
  RngStream rng(seed, 0xA100ULL);
  SmoothnessProbe out;
  out.min_gradient = INFINITY;
  for (long s = 0; s < samples; ++s) {
    const SurfacePoint p = sample_point(S, rng);
    const auto ch = charts_of(p);
    double g = 0;
    for (int a = 0; a < 3; ++a) g = std::max(g, std::abs(S.affine_partial(p.c, static_cast<Axis>(a), ch)));
    g /= scale;
    out.min_gradient = std::min(out.min_gradient, g);
    if (g < threshold) ++out.suspicious;
    ++out.samples;
  }
  return out;
}

FreeGroupSanity free_group_sanity(const Surface222& S, long words, int max_length, std::uint64_t seed, double tol) {
  if (max_length < 1) throw PreconditionError("word length must be at least 1");
  RngStream rng(seed, 0xB100ULL);
  FreeGroupSanity out;
  out.min_displacement = INFINITY;
  long attempts = 0;
  while (out.words < words) {
    if (++attempts > 10 * words + 100) throw NumericalContractError("free-group sanity: too many branch hits");
    const int len = 1 + static_cast<int>(rng.uniform() * max_length) % max_length;
    std::vector<int> word;
    while (static_cast<int>(word.size()) < len) {
      const int l = static_cast<int>(rng.uniform() * 3) % 3;
      if (word.empty() || word.back() != l) word.push_back(l);
    }
    const SurfacePoint p = sample_point(S, rng);
    SurfacePoint q = p;
    try {
      for (int l : word) q = involution(S, static_cast<Axis>(l), q);
    } catch (const BranchPointError&) {
      continue;
    }
    const double d = point_distance(p, q);
    out.min_displacement = std::min(out.min_displacement, d);
    if (d < tol) ++out.fixed;
    ++out.words;
  }
  return out;
}

}  // namespace plab
