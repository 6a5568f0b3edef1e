#pragma once

// A (2,2,2) hypersurface in (P^1)^3, its three covering involutions, the parabolic
// compositions preserving the elliptic fibrations, and numerical diagnostics of their
// dynamics (fiber orbit coverage, Birkhoff averages along random words).

#include "plab/types.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace plab {

using cd = std::complex<double>;

// Point of P^1 as (u:v), kept at max(|u|,|v|) = 1. Affine chart 0 is t = u/v, chart 1 is s = v/u.
struct ProjCoord {
  cd u{0}, v{1};

  static ProjCoord normalized(cd u, cd v);
  static ProjCoord from_affine(int chart, cd t);
  int chart() const { return std::abs(u) <= std::abs(v) ? 0 : 1; }
  cd affine(int in_chart) const { return in_chart == 0 ? u / v : v / u; }
  // chordal-type distance |u1 v2 - v1 u2| / (|p1| |p2|), zero iff equal
  double distance(const ProjCoord& o) const;
  bool operator==(const ProjCoord& o) const { return u == o.u && v == o.v; }
};

enum class Axis { X = 0, Y = 1, Z = 2 };
std::string to_string(Axis a);
Axis parse_axis(const std::string& s);

struct AxisPair {
  Axis first, second;  // the map is sigma_second o sigma_first
  Axis fixed() const;
};
std::string to_string(AxisPair p);
AxisPair parse_pair(const std::string& s);  // "yz", "xz", "xy" (or with comma)

class BranchPointError : public NumericalContractError {
 public:
  using NumericalContractError::NumericalContractError;
};

struct SurfacePoint {
  std::array<ProjCoord, 3> c;
  double residual = 0;
  const ProjCoord& operator[](Axis a) const { return c[static_cast<int>(a)]; }
  ProjCoord& operator[](Axis a) { return c[static_cast<int>(a)]; }
};

// Weights of A t^2 + B t + C in one variable, homogeneously A u^2 + B u v + C v^2.
struct AxisQuadratic {
  cd A, B, C;
  double scale() const { return std::max({std::abs(A), std::abs(B), std::abs(C)}); }
  cd discriminant() const { return B * B - 4.0 * A * C; }
  cd eval(const ProjCoord& p) const { return A * p.u * p.u + B * p.u * p.v + C * p.v * p.v; }
  // Both roots: (q : A) and (C : q) with q = -(B + sign sqrt(disc)) / 2 of maximal modulus.
  std::array<ProjCoord, 2> roots() const;
};

class Surface222 {
 public:
  // coeffs[i*9 + j*3 + k] multiplies x^i y^j z^k.
  Surface222(std::array<cd, 27> coeffs, std::uint64_t seed = 0);
  // Real coefficients uniform in [-1,1] from the seed.
  static Surface222 random_real(std::uint64_t seed);
  static Surface222 reference();
  // x^2 + y^2 + z^2 - 1; special, only for trivial tests.
  static Surface222 fermat_like();

  const std::array<cd, 27>& coeffs() const { return coeffs_; }
  cd coeff(int i, int j, int k) const { return coeffs_[i * 9 + j * 3 + k]; }
  std::uint64_t seed() const { return seed_; }

  // Homogeneous value at the given coordinates.
  cd eval(const std::array<ProjCoord, 3>& p) const;
  // Derivative in the affine coordinate of `axis` (in its chart), other coordinates taken
  // in their affine-homogeneous form (t,1) or (1,t).
  cd affine_partial(const std::array<ProjCoord, 3>& p, Axis axis, const std::array<int, 3>& charts) const;
  AxisQuadratic axis_quadratic(const std::array<ProjCoord, 3>& p, Axis axis) const;

 private:
  std::array<cd, 27> coeffs_;
  std::uint64_t seed_;
};

// splitmix64-derived streams; uniforms by hand so results do not depend on the standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);
  std::uint64_t next();
  double uniform();  // [0,1)
  double normal();
  cd complex_normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0;
};

constexpr double kBranchThreshold = 1e-8;
constexpr double kResidualLimit = 1e-10;

cd eval_f(const Surface222& S, const SurfacePoint& p);
SurfacePoint make_point(const Surface222& S, std::array<ProjCoord, 3> c);
// Uniform Fubini-Study (x, y), random root in z, resampled near the z-branch locus.
SurfacePoint sample_point(const Surface222& S, RngStream& rng, int max_retries = 100);
// Point on the fiber over the fixed coordinate of `pair` with random other coordinates.
SurfacePoint sample_on_fiber(const Surface222& S, Axis fixed, const ProjCoord& base, RngStream& rng,
                             int max_retries = 100);

SurfacePoint involution(const Surface222& S, Axis axis, const SurfacePoint& p);
SurfacePoint parabolic_map(const Surface222& S, AxisPair pair, const SurfacePoint& p);
SurfacePoint parabolic_inverse(const Surface222& S, AxisPair pair, const SurfacePoint& p);

// Largest coordinate distance between two points.
double point_distance(const SurfacePoint& a, const SurfacePoint& b);

using SurfaceMap = std::function<SurfacePoint(const SurfacePoint&)>;

// Ratio of the fiber 1-form before and after the map (which must preserve the fibers over
// the `fixed` coordinate), by central differences of step h: 1 for symplectic maps,
// -1 for the involutions.
cd form_ratio(const Surface222& S, Axis fixed, const SurfaceMap& map, const SurfacePoint& p, double h = 1e-6);

struct TranslationCheck {
  cd ratio;
  double deviation = 0;  // |ratio - 1|
  bool passed = false;
};
TranslationCheck translation_check(const Surface222& S, AxisPair pair, const SurfacePoint& p, double tol,
                                   double h = 1e-6);

// |det J|^2 |F_c(q)|^2 / |F_c'(map q)|^2 for the projection charts best conditioned at each end.
// 1 when the map preserves the volume form.
double measure_ratio(const Surface222& S, const SurfaceMap& map, const SurfacePoint& p, double h = 1e-6);

// Equal-area coordinates of P^1 in [0,1)^2: (arg(u conj v) / 2 pi mod 1, |u|^2 / (|u|^2 + |v|^2)).
std::array<double, 2> equal_area(const ProjCoord& p);

struct FiberOptions {
  std::vector<int> grids{16};
  int mesh_factor = 16;     // fiber mesh samples per cell edge in the parameter coordinate
  int checkpoints = 10;     // coverage recorded at N k / checkpoints for the first grid
  // A mesh cell counts as fiber-adjacent when it carries at least this multiple of the mean
  // invariant fiber mass per met cell. Cells the fiber only grazes are left out.
  double min_mass_ratio = 0.1;
};

struct GridCoverage {
  int grid = 0;
  long occupied = 0;  // fiber-adjacent cells visited by the orbit
  long adjacent = 0;  // fiber-adjacent cells
  double coverage = 0;
  long met = 0;            // every cell met by the mesh or the orbit
  long visited = 0;        // every cell visited by the orbit
  double raw_coverage = 0;  // visited / met
};

struct FiberOrbitReport {
  AxisPair pair{Axis::Y, Axis::Z};
  ProjCoord base;
  SurfacePoint start;
  long N = 0;
  std::vector<GridCoverage> grids;
  std::vector<std::pair<long, double>> checkpoints;
  long interruptions = 0;
};

FiberOrbitReport fiber_orbit(const Surface222& S, AxisPair pair, const SurfacePoint& start, long N,
                             const FiberOptions& options = {});

// Bounded test functions for the Birkhoff diagnostic.
enum class TestFunction { One, BX, BYBZ, ReX, BY };
std::string to_string(TestFunction f);
TestFunction parse_test_function(const std::string& s);
double evaluate(TestFunction f, const SurfacePoint& p);

struct SpaceAverage {
  double mean = 0;
  double stderr_ = 0;
  long samples = 0;
};

// Self-normalized estimate of the integral against |Omega|^2, sampling FS x FS on each of the
// three coordinate-pair projections (both roots of the third) with balance-heuristic weights.
SpaceAverage space_average(const Surface222& S, TestFunction f, long samples, std::uint64_t seed,
                           unsigned workers = 1);

struct ErgodicityOptions {
  std::vector<AxisPair> maps{{Axis::Y, Axis::Z}, {Axis::X, Axis::Z}};
  long word_length = 10000;
  int trials = 16;
  long burn_in = 1000;
  long mc_samples = 1000000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct ErgodicityReport {
  TestFunction f = TestFunction::One;
  std::vector<double> trial_means;
  double time_mean = 0, time_stderr = 0;
  SpaceAverage space;
  double z_score = 0;
  bool passed = false;  // |time - space| < 3 combined standard errors
  long interruptions = 0;
  static constexpr const char* kLabel = "heuristic consistency check, not a proof of ergodicity";
};

ErgodicityReport birkhoff_ergodicity_test(const Surface222& S, TestFunction f, const ErgodicityOptions& options);

struct ContrastReport {
  AxisPair map{Axis::Y, Axis::Z};
  TestFunction f = TestFunction::BY;
  std::vector<std::vector<double>> means;  // per fiber, per trial
  double cross_fiber_variance = 0;
  double within_fiber_variance = 0;
  double ratio = 0;
  static constexpr const char* kLabel = "heuristic consistency check, not a proof of ergodicity";
};

// Time averages of a single parabolic map from several starts on each of several fibers.
ContrastReport single_parabolic_contrast(const Surface222& S, AxisPair map, TestFunction f, int fibers, int trials,
                                         long word_length, std::uint64_t seed, unsigned workers = 1);

struct SmoothnessProbe {
  long samples = 0;
  double min_gradient = 0;  // smallest normalized |grad F| seen
  long suspicious = 0;      // samples below the threshold
};
SmoothnessProbe smoothness_probe(const Surface222& S, long samples, std::uint64_t seed, double threshold = 1e-6);

struct FreeGroupSanity {
  long words = 0;
  long fixed = 0;  // words that failed to move the point
  double min_displacement = 0;
};
FreeGroupSanity free_group_sanity(const Surface222& S, long words, int max_length, std::uint64_t seed,
                                  double tol = 1e-8);

}  // namespace plab
