#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "udm/curve_model.hpp"

namespace udm::measure {

class TangencyUnresolvedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Isometry {
  Mat rotation;     // orthogonal
  Vec translation;

  static Isometry identity(int dim);
  static Isometry translate(const Vec& v);
  Vec apply(const Vec& p) const { return rotation * p + translation; }
  Vec apply_inverse(const Vec& p) const { return rotation.transpose() * (p - translation); }
};

/// One-dimensional curve support: isometric copies of a base curve, each
/// carrying arclength (Hausdorff) measure. Domain is either the full
/// parameter line or one period of a closed curve.
struct CurveUnionSpec {
  std::shared_ptr<const ParametricCurve> base;
  std::vector<Isometry> copies;  // at least one
  bool periodic = false;
  double period = 0.0;  // parameter period when periodic
};

/// Atom chain: a single weighted point (step == 0) or the 1-D lattice
/// origin + step * k * direction, k in Z.
struct PointChain {
  Vec origin;
  Vec direction;  // unit; ignored when step == 0
  double step = 0.0;
  double mass = 1.0;
};

struct PointSetSpec {
  std::vector<PointChain> chains;
};

struct SupportSpec {
  std::variant<CurveUnionSpec, PointSetSpec> payload;

  int dimension() const;
  bool is_curve_union() const { return std::holds_alternative<CurveUnionSpec>(payload); }
  const CurveUnionSpec& curve_union() const { return std::get<CurveUnionSpec>(payload); }
  const PointSetSpec& point_set() const { return std::get<PointSetSpec>(payload); }
};

/// Structural checks before any scan: parameter validity, local finiteness
/// (a non-closed bounded curve carries infinite local mass), embeddedness of
/// the union (pairwise component distance bounded away from zero), distinct
/// point atoms. Throws ValidationError.
void validate(const SupportSpec& spec);

struct BallMassStats {
  int tangencies = 0;  // grazing contacts classified as zero-length
};

/// mu(closed ball B(x, r)): total arclength of {t : |copy(t) - x| <= r}
/// summed over copies, via grid bracketing plus bisection of
/// g(t) = |copy(t) - x|^2 - r^2; total atom mass within distance r for
/// point supports. Throws TangencyUnresolvedError when a grazing contact
/// cannot be classified at tolerance.
double ball_mass(const SupportSpec& spec, const Vec& x, double r, BallMassStats* stats = nullptr);

struct RadiusStat {
  double r = 0.0;
  double mean_mass = 0.0;
  double max_abs_deviation = 0.0;
  Vec worst_basepoint;
};

struct UniformityReport {
  std::vector<RadiusStat> stats;
  double tolerance = 0.0;
  bool uniform = false;
  std::optional<double> first_failing_radius;
  int basepoint_count = 0;
  int tangencies = 0;
  std::uint64_t seed = 0;
};

/// Evaluates mu(B(x, r)) across stratified basepoints (per copy and period
/// for curve unions, per chain window for point sets) for every radius in
/// the grid. Verdict is uniform-to-tolerance iff the max deviation from the
/// mean stays within tol at every radius. The seed jitters basepoints
/// inside their strata; identical inputs give identical reports.
UniformityReport uniformity_scan(const SupportSpec& spec, const std::vector<double>& radii,
                                 int basepoints_per_component, double tol, std::uint64_t seed = 0);

/// Stratified basepoints as used by uniformity_scan.
std::vector<Vec> sample_basepoints(const SupportSpec& spec, int per_component, std::uint64_t seed);

struct OddPolyFit {
  std::vector<int> powers;          // 1, 3, 5, ...
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  double max_residual = 0.0;
};

/// Least-squares odd-polynomial fit of r -> mu(B(x0, r)) on a radius grid
/// in (0, r_max]; x0 is the first stratified basepoint. The r^1 coefficient
/// of any 1-rectifiable support comes out ~= 2. Throws IllConditionedError
/// when the grid cannot resolve the requested degree.
OddPolyFit empirical_f_fit(const SupportSpec& spec, int degree, double r_max, int n_radii = 48);

struct PairDistance {
  int i = 0;
  int j = 0;
  double min_distance = 0.0;
  double max_distance = 0.0;
  double variation = 0.0;  // max - min over basepoints on copy i
  bool constant = false;
};

/// For each ordered pair of copies: dist(x, copy_j) sampled over basepoints
/// x on copy i; `constant` asserts variation <= tol.
std::vector<PairDistance> component_distances(const SupportSpec& spec, double tol = 1e-6,
                                              int samples_per_copy = 33);

// Generators for the classified families.
SupportSpec gen_line_lebesgue(int dim);
SupportSpec gen_line_lattice(double a, int dim);
SupportSpec gen_line_double_lattice(double a, double b, int dim);
/// Vertices of a regular n-gon of circumradius R, optionally united with a
/// second copy rotated by `offset`.
SupportSpec gen_ngon(int n, double R, int phases = 1, double offset = 0.0);
/// Helix copies translated along the axis by the lattice (pitch/n) Z union
/// its shift by a, pitch = 2 pi b / alpha. Requires unit speed
/// r1^2 alpha^2 + b^2 = 1, b > 0, 0 <= a < pitch / n.
SupportSpec gen_prop3d(double r1, double alpha, double b, int n, double a);

}  // namespace udm::measure
