#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace udm::curves {

class DegenerateCurvaturesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rotation-block/drift parametrization of a constant-curvature curve:
///   t -> (r_1 cos(a_1 t), r_1 sin(a_1 t), ..., r_m cos(a_m t), r_m sin(a_m t) [, b t]),
/// zero-padded to the ambient dimension. Unit speed requires
/// sum_i r_i^2 a_i^2 + b^2 = 1.
struct HelixBlock {
  double radius = 0.0;
  double angular_speed = 0.0;
};

struct HelixParams {
  std::vector<HelixBlock> blocks;
  double drift = 0.0;
  int ambient_dimension = 0;

  int span_dimension() const {
    return 2 * static_cast<int>(blocks.size()) + (drift > 0.0 ? 1 : 0);
  }
  /// Throws std::invalid_argument when the block data is inconsistent
  /// (non-positive radii, zero or repeated |angular speed|, negative drift,
  /// span exceeding the ambient dimension, or speed != 1).
  void validate() const;
};

Vec eval_helix(const HelixParams& p, double t);

/// Exact derivative of any order (trigonometric differentiation).
Vec helix_derivative(const HelixParams& p, double t, int order);

struct CurvatureVector {
  std::vector<double> kappas;
  int dimension() const { return static_cast<int>(kappas.size()) + 1; }
};

/// Skew-symmetric tridiagonal coefficient matrix of the frame ODE:
/// entries (j, j+1) = kappa_j, (j+1, j) = -kappa_j.
Mat frenet_matrix(const CurvatureVector& kv);

/// Constant-curvature curve realizing kv, as helix parameters. Interior
/// zero curvatures are rejected (DegenerateCurvaturesError); trailing zeros
/// lower the span dimension. The last curvature's sign selects the
/// orientation; all other curvatures must be positive.
HelixParams curvatures_to_helix(const CurvatureVector& kv);

/// Frenet curvatures of a valid helix at any point (they are constant),
/// from exact derivatives at t = 0.
CurvatureVector helix_curvatures(const HelixParams& p);

struct FrenetState {
  double s = 0.0;
  Vec position;
  Mat frame;  // rows E_1..E_d, orthonormal
};

/// Fixed-step RK4 on the frame ODE plus position quadrature (position' =
/// E_1), frame re-orthonormalized every step. Starts at the origin with the
/// standard basis frame. Returns steps+1 states including s = 0.
std::vector<FrenetState> integrate_frenet(const CurvatureVector& kv, double s_end, int steps);

/// Same with arclength-dependent curvatures kappas(s) (size d-1).
std::vector<FrenetState> integrate_frenet(const std::function<std::vector<double>(double)>& kappas,
                                          int dimension, double s_end, int steps);

struct CurvatureEstimate {
  int sample_index = 0;   // window center
  double s = 0.0;
  std::vector<double> kappas;
  int rank = 0;           // number of derivative directions above tolerance
  bool degenerate = false;
};

/// Frenet curvatures from arclength-uniform samples: central finite
/// differences for the derivatives, then Gram-Schmidt. Windows whose pivot
/// falls below tolerance report the truncated rank with trailing curvatures
/// zero and are flagged degenerate only when the deficiency is ambiguous
/// (pivot between the hard floor and the scale-relative threshold).
/// Truncation error is O(h^2). Requires at least 2d+1 samples.
std::vector<CurvatureEstimate> estimate_curvatures(const std::vector<Vec>& samples, double spacing);

struct ToricCheck {
  bool is_knot = false;
  double period = 0.0;  // minimal period when is_knot
};

/// A helix is a closed (periodic) curve exactly when it has no drift and
/// all angular-speed ratios are rational.
ToricCheck is_toric_knot(const HelixParams& p);

/// Central finite-difference weights on the symmetric stencil
/// {-w, ..., w} for the m-th derivative, spacing h. Minimal half-width
/// w = ceil(m/2) gives O(h^2) accuracy.
std::vector<double> central_difference_weights(int m, int half_width, double h);

}  // namespace udm::curves
