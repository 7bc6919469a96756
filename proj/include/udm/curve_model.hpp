#pragma once

#include <memory>
#include <optional>

#include "udm/curves.hpp"

namespace udm::measure {

using curves::Mat;
using curves::Vec;

/// Parametric curve interface used by support specifications. Instances are
/// immutable once constructed.
class ParametricCurve {
 public:
  virtual ~ParametricCurve() = default;

  virtual int dimension() const = 0;
  virtual Vec position(double t) const = 0;
  virtual Vec velocity(double t) const = 0;
  virtual bool unit_speed() const = 0;

  /// Parameter period for closed curves.
  virtual std::optional<double> parameter_period() const = 0;

  /// Unbounded direction along which <u, position(t)> = offset + rate * t
  /// exactly; lets ball queries confine the parameter window.
  struct Axis {
    Vec direction;
    double rate = 0.0;
    double offset = 0.0;
  };
  virtual std::optional<Axis> linear_axis() const = 0;

  /// Bound on how fast the squared-distance function oscillates per unit
  /// parameter; used to size root-isolation grids.
  virtual double resolution_scale() const = 0;

  double speed(double t) const { return velocity(t).norm(); }
};

class HelixCurve final : public ParametricCurve {
 public:
  explicit HelixCurve(curves::HelixParams params);

  int dimension() const override { return params_.ambient_dimension; }
  Vec position(double t) const override { return curves::eval_helix(params_, t); }
  Vec velocity(double t) const override { return curves::helix_derivative(params_, t, 1); }
  bool unit_speed() const override { return true; }
  std::optional<double> parameter_period() const override;
  std::optional<Axis> linear_axis() const override;
  double resolution_scale() const override;

  const curves::HelixParams& params() const { return params_; }
  /// Axial translation period: shifting by pitch * k maps the curve onto
  /// itself. Only meaningful when the drift is positive.
  double pitch() const;

 private:
  curves::HelixParams params_;
};

/// Planar ellipse (a cos t, b sin t); the standard non-constant-curvature
/// negative control. Not unit speed.
class EllipseCurve final : public ParametricCurve {
 public:
  EllipseCurve(double semi_axis_a, double semi_axis_b);

  int dimension() const override { return 2; }
  Vec position(double t) const override;
  Vec velocity(double t) const override;
  bool unit_speed() const override { return false; }
  std::optional<double> parameter_period() const override;
  std::optional<Axis> linear_axis() const override { return std::nullopt; }
  double resolution_scale() const override;

  double semi_axis_a() const { return a_; }
  double semi_axis_b() const { return b_; }
  /// Curvature at parameter t (not arclength).
  double curvature_at(double t) const;

 private:
  double a_;
  double b_;
};

/// Positions spaced uniformly in arclength starting from parameter t0; for
/// non-unit-speed curves the parameter is advanced by integrating
/// dt/ds = 1/|velocity|.
std::vector<Vec> sample_uniform_arclength(const ParametricCurve& curve, double t0, double spacing,
                                          int count);

}  // namespace udm::measure
