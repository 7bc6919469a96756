#include "udm/measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <thread>

namespace udm::measure {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRootTol = 1e-12;       // bisection |t| tolerance
constexpr double kTangencyBand = 1e-10;  // |g| band treated as grazing contact

}  // namespace

// --- curve model -----------------------------------------------------------

HelixCurve::HelixCurve(curves::HelixParams params) : params_(std::move(params)) {
  params_.validate();
}

std::optional<double> HelixCurve::parameter_period() const {
  const auto check = curves::is_toric_knot(params_);
  if (check.is_knot) return check.period;
  return std::nullopt;
}

double HelixCurve::pitch() const {
  if (params_.drift <= 0.0 || params_.blocks.empty()) return 0.0;
  double min_alpha = std::abs(params_.blocks.front().angular_speed);
  for (const auto& b : params_.blocks) min_alpha = std::min(min_alpha, std::abs(b.angular_speed));
  return 2.0 * kPi * params_.drift / min_alpha;
}

std::optional<ParametricCurve::Axis> HelixCurve::linear_axis() const {
  if (params_.drift <= 0.0) return std::nullopt;
  Axis axis;
  axis.direction = Vec::Zero(params_.ambient_dimension);
  axis.direction[static_cast<Eigen::Index>(2 * params_.blocks.size())] = 1.0;
  axis.rate = params_.drift;
  axis.offset = 0.0;
  return axis;
}

double HelixCurve::resolution_scale() const {
  double m = 1.0;
  for (const auto& b : params_.blocks) m = std::max(m, std::abs(b.angular_speed));
  return m;
}

EllipseCurve::EllipseCurve(double semi_axis_a, double semi_axis_b) : a_(semi_axis_a), b_(semi_axis_b) {
  if (a_ <= 0.0 || b_ <= 0.0) throw std::invalid_argument("ellipse semi-axes must be positive");
}

Vec EllipseCurve::position(double t) const {
  Vec p(2);
  p << a_ * std::cos(t), b_ * std::sin(t);
  return p;
}

Vec EllipseCurve::velocity(double t) const {
  Vec v(2);
  v << -a_ * std::sin(t), b_ * std::cos(t);
  return v;
}

std::optional<double> EllipseCurve::parameter_period() const { return 2.0 * kPi; }

double EllipseCurve::resolution_scale() const { return std::max(1.0, std::max(a_, b_)); }

double EllipseCurve::curvature_at(double t) const {
  const double w = a_ * a_ * std::sin(t) * std::sin(t) + b_ * b_ * std::cos(t) * std::cos(t);
  return a_ * b_ / std::pow(w, 1.5);
}

std::vector<Vec> sample_uniform_arclength(const ParametricCurve& curve, double t0, double spacing,
                                          int count) {
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(count));
  double t = t0;
  for (int i = 0; i < count; ++i) {
    out.push_back(curve.position(t));
    if (curve.unit_speed()) {
      t += spacing;
      continue;
    }
    // dt/ds = 1 / speed, advanced by RK4 in substeps of the spacing.
    const int substeps = 32;
    const double ds = spacing / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double k1 = 1.0 / curve.speed(t);
      const double k2 = 1.0 / curve.speed(t + 0.5 * ds * k1);
      const double k3 = 1.0 / curve.speed(t + 0.5 * ds * k2);
      const double k4 = 1.0 / curve.speed(t + ds * k3);
      t += ds * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
  }
  return out;
}

// --- isometries and specs --------------------------------------------------

Isometry Isometry::identity(int dim) {
  return Isometry{Mat::Identity(dim, dim), Vec::Zero(dim)};
}

Isometry Isometry::translate(const Vec& v) {
  return Isometry{Mat::Identity(v.size(), v.size()), v};
}

int SupportSpec::dimension() const {
  if (is_curve_union()) return curve_union().base->dimension();
  const auto& ps = point_set();
  return ps.chains.empty() ? 0 : static_cast<int>(ps.chains.front().origin.size());
}

// --- root isolation on one curve copy ---------------------------------------

namespace {

struct SublevelResult {
  std::vector<std::pair<double, double>> intervals;  // parameter intervals with g <= 0
  bool whole_domain = false;
  int tangencies = 0;
};

double bisect_root(const std::function<double(double)>& g, double a, double b, double ga) {
  // Invariant: sign(g(a)) != sign(g(b)); returns the crossing within kRootTol.
  double lo = a, hi = b;
  double glo = ga;
  for (int it = 0; it < 200 && (hi - lo) > kRootTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((glo <= 0.0) == (gm <= 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section refinement of an interior extremum bracketed by
// (a, m, b); minimizes sign * g.
std::pair<double, double> refine_extremum(const std::function<double(double)>& g, double a, double m,
                                          double b, double sign) {
  const double phi = 0.5 * (3.0 - std::sqrt(5.0));
  double lo = a, hi = b, x = m;
  double fx = sign * g(x);
  for (int it = 0; it < 120 && (hi - lo) > 1e-11 * (1.0 + std::abs(x)); ++it) {
    const double y = (x - lo > hi - x) ? x - phi * (x - lo) : x + phi * (hi - x);
    const double fy = sign * g(y);
    if (fy < fx) {
      if (y < x) hi = x; else lo = x;
      x = y;
      fx = fy;
    } else {
      if (y < x) lo = y; else hi = y;
    }
  }
  if (!std::isfinite(fx)) throw TangencyUnresolvedError("extremum refinement failed");
  return {x, sign * fx};
}

// Finds {t : g(t) <= 0} for a smooth oscillatory g on [t_lo, t_hi]
// (cyclically when periodic). The grid is fine enough for transverse
// crossings; grazing dips and pinches are recovered by extremum refinement.
SublevelResult isolate_sublevel(const std::function<double(double)>& g, double t_lo, double t_hi,
                                double step, bool periodic, double g_scale) {
  SublevelResult result;
  const double span = t_hi - t_lo;
  int n = std::max(periodic ? 48 : 16, static_cast<int>(std::ceil(span / step)));
  if (n > 40'000'000) throw std::invalid_argument("root isolation grid too large");

  std::vector<double> gv(static_cast<size_t>(n) + 1);
  const double dt = span / n;
  for (int i = 0; i <= n; ++i) gv[static_cast<size_t>(i)] = g(t_lo + i * dt);

  const double tangency_band = kTangencyBand * g_scale;
  std::vector<double> roots;

  auto grid_t = [&](int i) { return t_lo + i * dt; };
  auto add_bracket = [&](double a, double b, double ga) { roots.push_back(bisect_root(g, a, b, ga)); };

  for (int i = 0; i < n; ++i) {
    const double ga = gv[static_cast<size_t>(i)];
    const double gb = gv[static_cast<size_t>(i + 1)];
    if ((ga <= 0.0) != (gb <= 0.0)) add_bracket(grid_t(i), grid_t(i + 1), ga);
  }

  // Interior extrema of like-signed neighbourhoods: a positive minimum may
  // hide a dip below zero, a negative maximum a pinch above zero.
  auto neighbor = [&](int i, int off) {
    int j = i + off;
    if (periodic) {
      j = (j % n + n) % n;
      return gv[static_cast<size_t>(j)];
    }
    j = std::clamp(j, 0, n);
    return gv[static_cast<size_t>(j)];
  };
  for (int i = periodic ? 0 : 1; i <= n - 1; ++i) {
    const double gc = gv[static_cast<size_t>(i)];
    const double gl = neighbor(i, -1);
    const double gr = neighbor(i, +1);
    const bool is_min = gc > 0.0 && gl >= gc && gr >= gc;
    const bool is_max = gc < 0.0 && gl <= gc && gr <= gc;
    if (!is_min && !is_max) continue;
    const double a = grid_t(i) - dt;
    const double b = grid_t(i) + dt;
    const auto [tx, gx] = refine_extremum(g, a, grid_t(i), b, is_min ? +1.0 : -1.0);
    if (std::abs(gx) < tangency_band) {
      ++result.tangencies;  // grazing contact: measure-zero, contributes nothing
      continue;
    }
    if (is_min && gx < 0.0) {
      add_bracket(a, tx, g(a));
      add_bracket(tx, b, gx);
    } else if (is_max && gx > 0.0) {
      add_bracket(a, tx, g(a));
      add_bracket(tx, b, gx);
    }
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 0.5 * kRootTol; }),
              roots.end());

  if (roots.empty()) {
    if (gv[0] <= 0.0) result.whole_domain = true;
    return result;
  }

  if (periodic) {
    for (size_t k = 0; k < roots.size(); ++k) {
      const double a = roots[k];
      const double b = (k + 1 < roots.size()) ? roots[k + 1] : roots[0] + span;
      if (g(0.5 * (a + b)) <= 0.0) result.intervals.emplace_back(a, b);
    }
  } else {
    double prev = t_lo;
    for (size_t k = 0; k <= roots.size(); ++k) {
      const double next = (k < roots.size()) ? roots[k] : t_hi;
      if (next > prev && g(0.5 * (prev + next)) <= 0.0) result.intervals.emplace_back(prev, next);
      prev = next;
    }
  }
  return result;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double arc_length(const ParametricCurve& curve, double a, double b) {
  if (curve.unit_speed()) return b - a;
  auto f = [&](double t) { return curve.speed(t); };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, 1e-13 * (1.0 + std::abs(b - a)), 40);
}

// Arclength of one isometric copy inside the closed ball B(x, r).
double copy_ball_mass(const ParametricCurve& curve, const Isometry& iso, bool periodic,
                      double period, const Vec& x, double r, BallMassStats* stats) {
  const Vec local = iso.apply_inverse(x);
  auto g = [&](double t) { return (curve.position(t) - local).squaredNorm() - r * r; };

  double t_lo, t_hi;
  if (periodic) {
    t_lo = 0.0;
    t_hi = period;
  } else {
    const auto axis = curve.linear_axis();
    if (!axis) throw ValidationError("unbounded curve without a drift axis is not locally finite");
    const double u = axis->direction.dot(local);
    t_lo = (u - axis->offset - r) / axis->rate - kRootTol;
    t_hi = (u - axis->offset + r) / axis->rate + kRootTol;
  }

  const double step = (r / 8.0) / curve.resolution_scale();
  const auto sub = isolate_sublevel(g, t_lo, t_hi, step, periodic, 1.0 + r * r);
  if (stats) stats->tangencies += sub.tangencies;

  if (sub.whole_domain) {
    return periodic ? arc_length(curve, 0.0, period) : t_hi - t_lo;
  }
  double mass = 0.0;
  for (const auto& [a, b] : sub.intervals) mass += arc_length(curve, a, b);
  return mass;
}

double chain_ball_mass(const PointChain& chain, const Vec& x, double r) {
  const double snap = 1e-9 * (1.0 + r);
  if (chain.step == 0.0) {
    return ((chain.origin - x).norm() <= r + snap) ? chain.mass : 0.0;
  }
  // |origin + k step dir - x|^2 <= r^2, quadratic in the integer k.
  const Vec v = chain.origin - x;
  const double a = chain.step * chain.step;
  const double b = 2.0 * chain.step * chain.direction.dot(v);
  const double c = v.squaredNorm() - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double k_lo = (-b - sq) / (2.0 * a);
  const double k_hi = (-b + sq) / (2.0 * a);
  const double lo = std::ceil(k_lo - snap / chain.step);
  const double hi = std::floor(k_hi + snap / chain.step);
  if (hi < lo) return 0.0;
  return chain.mass * (hi - lo + 1.0);
}

}  // namespace

double ball_mass(const SupportSpec& spec, const Vec& x, double r, BallMassStats* stats) {
  if (r <= 0.0) throw std::invalid_argument("radius must be positive");
  if (spec.is_curve_union()) {
    const auto& cu = spec.curve_union();
    double total = 0.0;
    for (const auto& iso : cu.copies) {
      total += copy_ball_mass(*cu.base, iso, cu.periodic, cu.period, x, r, stats);
    }
    return total;
  }
  double total = 0.0;
  for (const auto& chain : spec.point_set().chains) total += chain_ball_mass(chain, x, r);
  return total;
}

// --- basepoints and scans ----------------------------------------------------

namespace {

double representative_window(const CurveUnionSpec& cu) {
  if (cu.periodic) return cu.period;
  if (const auto* helix = dynamic_cast<const HelixCurve*>(cu.base.get())) {
    if (!helix->params().blocks.empty()) {
      return 2.0 * kPi / std::abs(helix->params().blocks.front().angular_speed);
    }
  }
  return 1.0;  // straight line: any unit window
}

}  // namespace

std::vector<Vec> sample_basepoints(const SupportSpec& spec, int per_component, std::uint64_t seed) {
  if (per_component < 1) throw std::invalid_argument("need at least one basepoint per component");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.45, 0.45);

  std::vector<Vec> points;
  if (spec.is_curve_union()) {
    const auto& cu = spec.curve_union();
    const double window = representative_window(cu);
    for (const auto& iso : cu.copies) {
      for (int j = 0; j < per_component; ++j) {
        const double jitter = (seed == 0) ? 0.0 : unit(rng);
        const double t = window * (j + 0.5 + jitter) / per_component;
        points.push_back(iso.apply(cu.base->position(t)));
      }
    }
    return points;
  }
  const int half = std::max(1, per_component / 2);
  for (const auto& chain : spec.point_set().chains) {
    if (chain.step == 0.0) {
      points.push_back(chain.origin);
      continue;
    }
    for (int k = -half; k <= half; ++k) {
      points.push_back(chain.origin + (chain.step * k) * chain.direction);
    }
  }
  return points;
}

UniformityReport uniformity_scan(const SupportSpec& spec, const std::vector<double>& radii,
                                 int basepoints_per_component, double tol, std::uint64_t seed) {
  if (basepoints_per_component < 2 && spec.is_curve_union()) {
    throw std::invalid_argument("uniformity scan needs at least two basepoints");
  }
  const std::vector<Vec> basepoints = sample_basepoints(spec, basepoints_per_component, seed);
  if (basepoints.size() < 2) throw std::invalid_argument("support yields fewer than two basepoints");

  UniformityReport report;
  report.tolerance = tol;
  report.seed = seed;
  report.basepoint_count = static_cast<int>(basepoints.size());
  report.stats.resize(radii.size());

  std::vector<int> tangency_per_radius(radii.size(), 0);
  auto run_radius = [&](size_t ri) {
    const double r = radii[ri];
    BallMassStats stats;
    double mean = 0.0;
    std::vector<double> masses(basepoints.size());
    for (size_t b = 0; b < basepoints.size(); ++b) {
      masses[b] = ball_mass(spec, basepoints[b], r, &stats);
      mean += masses[b];
    }
    mean /= static_cast<double>(basepoints.size());
    RadiusStat stat;
    stat.r = r;
    stat.mean_mass = mean;
    stat.max_abs_deviation = 0.0;
    stat.worst_basepoint = basepoints.front();
    for (size_t b = 0; b < basepoints.size(); ++b) {
      const double dev = std::abs(masses[b] - mean);
      if (dev > stat.max_abs_deviation) {
        stat.max_abs_deviation = dev;
        stat.worst_basepoint = basepoints[b];
      }
    }
    report.stats[ri] = std::move(stat);
    tangency_per_radius[ri] = stats.tangencies;
  };

  // Radii are independent; the reduction below is index-ordered, so the
  // verdict does not depend on execution order.
  const unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                              static_cast<unsigned>(radii.size()));
  if (workers > 1 && radii.size() >= 4) {
    std::vector<std::future<void>> futures;
    std::atomic<size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (size_t ri = next.fetch_add(1); ri < radii.size(); ri = next.fetch_add(1)) run_radius(ri);
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (size_t ri = 0; ri < radii.size(); ++ri) run_radius(ri);
  }

  report.uniform = true;
  for (size_t ri = 0; ri < radii.size(); ++ri) {
    report.tangencies += tangency_per_radius[ri];
    if (report.stats[ri].max_abs_deviation > tol && report.uniform) {
      report.uniform = false;
      report.first_failing_radius = report.stats[ri].r;
    }
  }
  return report;
}

OddPolyFit empirical_f_fit(const SupportSpec& spec, int degree, double r_max, int n_radii) {
  if (degree < 1 || degree > 7) throw std::invalid_argument("fit degree must be in [1, 7]");
  if (r_max <= 0.0) throw std::invalid_argument("r_max must be positive");

  std::vector<int> powers;
  for (int p = 1; p <= degree; p += 2) powers.push_back(p);
  if (n_radii < 2 * static_cast<int>(powers.size())) {
    throw IllConditionedError("radius grid too small for requested degree");
  }

  const Vec x0 = sample_basepoints(spec, 3, 0).front();

  Eigen::MatrixXd design(n_radii, static_cast<Eigen::Index>(powers.size()));
  Eigen::VectorXd rhs(n_radii);
  for (int i = 0; i < n_radii; ++i) {
    const double r = r_max * (i + 1.0) / n_radii;
    rhs[i] = ball_mass(spec, x0, r);
    for (size_t k = 0; k < powers.size(); ++k) {
      design(i, static_cast<Eigen::Index>(k)) = std::pow(r / r_max, powers[k]);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  if (!std::isfinite(cond) || cond > 1e12) {
    throw IllConditionedError("radius grid too narrow to resolve the requested degree");
  }
  const Eigen::VectorXd scaled = svd.solve(rhs);

  OddPolyFit fit;
  fit.powers = powers;
  fit.coefficients.resize(powers.size());
  for (size_t k = 0; k < powers.size(); ++k) {
    fit.coefficients[k] = scaled[static_cast<Eigen::Index>(k)] / std::pow(r_max, powers[k]);
  }

  const Eigen::VectorXd residual = design * scaled - rhs;
  fit.max_residual = residual.lpNorm<Eigen::Infinity>();
  const double sigma2 = residual.squaredNorm() / std::max(1, n_radii - static_cast<int>(powers.size()));
  const Eigen::MatrixXd gram_inv =
      (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(
          static_cast<Eigen::Index>(powers.size()), static_cast<Eigen::Index>(powers.size())));
  fit.std_errors.resize(powers.size());
  for (size_t k = 0; k < powers.size(); ++k) {
    fit.std_errors[k] = std::sqrt(std::max(0.0, sigma2 * gram_inv(static_cast<Eigen::Index>(k),
                                                                  static_cast<Eigen::Index>(k)))) /
                        std::pow(r_max, powers[k]);
  }
  return fit;
}

// --- component distances -----------------------------------------------------

namespace {

double distance_to_copy(const SupportSpec& spec, const Vec& x, size_t copy_index) {
  const auto& cu = spec.curve_union();
  const auto& iso = cu.copies[copy_index];
  const auto& curve = *cu.base;
  const Vec local = iso.apply_inverse(x);
  auto dist = [&](double t) { return (curve.position(t) - local).norm(); };

  double t_lo, t_hi;
  if (cu.periodic) {
    t_lo = 0.0;
    t_hi = cu.period;
  } else {
    const auto axis = curve.linear_axis();
    if (!axis) throw ValidationError("unbounded curve without a drift axis");
    const double tc = (axis->direction.dot(local) - axis->offset) / axis->rate;
    // First pass bounds the minimum, second pass covers every parameter
    // whose axial gap alone stays within that bound.
    double best = std::numeric_limits<double>::infinity();
    const double coarse_half = 2.0 * kPi / curve.resolution_scale() + 2.0 / axis->rate;
    for (int i = 0; i <= 256; ++i) {
      best = std::min(best, dist(tc - coarse_half + 2.0 * coarse_half * i / 256));
    }
    const double half = (best * 1.25 + 1e-6) / axis->rate + coarse_half;
    t_lo = tc - half;
    t_hi = tc + half;
  }

  const int n = 4096;
  double best_t = t_lo;
  double best_d = dist(t_lo);
  for (int i = 1; i <= n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / n;
    const double d = dist(t);
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  const double dt = (t_hi - t_lo) / n;
  const auto [tmin, dmin] = refine_extremum(dist, best_t - dt, best_t, best_t + dt, +1.0);
  (void)tmin;
  return dmin;
}

}  // namespace

std::vector<PairDistance> component_distances(const SupportSpec& spec, double tol,
                                              int samples_per_copy) {
  if (!spec.is_curve_union()) throw std::invalid_argument("component distances need a curve union");
  const auto& cu = spec.curve_union();
  const size_t m = cu.copies.size();
  std::vector<PairDistance> out;
  if (m < 2) return out;

  const double window = representative_window(cu);
  for (size_t i = 0; i < m; ++i) {
    std::vector<Vec> basepoints;
    for (int k = 0; k < samples_per_copy; ++k) {
      basepoints.push_back(cu.copies[i].apply(cu.base->position(window * (k + 0.5) / samples_per_copy)));
    }
    for (size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      PairDistance pd;
      pd.i = static_cast<int>(i);
      pd.j = static_cast<int>(j);
      pd.min_distance = std::numeric_limits<double>::infinity();
      pd.max_distance = 0.0;
      for (const auto& x : basepoints) {
        const double d = distance_to_copy(spec, x, j);
        pd.min_distance = std::min(pd.min_distance, d);
        pd.max_distance = std::max(pd.max_distance, d);
      }
      pd.variation = pd.max_distance - pd.min_distance;
      pd.constant = pd.variation <= tol;
      out.push_back(pd);
    }
  }
  return out;
}

// --- validation ---------------------------------------------------------------

void validate(const SupportSpec& spec) {
  if (spec.is_curve_union()) {
    const auto& cu = spec.curve_union();
    if (!cu.base) throw ValidationError("curve union has no base curve");
    if (cu.copies.empty()) throw ValidationError("curve union needs at least one copy");
    const int dim = cu.base->dimension();
    for (const auto& iso : cu.copies) {
      if (iso.rotation.rows() != dim || iso.rotation.cols() != dim ||
          iso.translation.size() != dim) {
        throw ValidationError("isometry dimension mismatch");
      }
      const double defect = (iso.rotation.transpose() * iso.rotation - Mat::Identity(dim, dim))
                                .lpNorm<Eigen::Infinity>();
      if (defect > 1e-9) throw ValidationError("copy rotation is not orthogonal");
    }
    if (cu.periodic) {
      if (cu.period <= 0.0) throw ValidationError("periodic domain needs a positive period");
    } else if (!cu.base->linear_axis()) {
      // A bounded non-closed curve (e.g. an irrational toric curve) carries
      // infinite mass in some ball.
      throw ValidationError("full-line domain requires a drift axis; use a periodic domain");
    }
    // Embeddedness across copies: minimum inter-component distance must be
    // positive. Within one copy the constant-curvature/ellipse bases are
    // embedded by construction.
    if (cu.copies.size() > 1) {
      for (const auto& pd : component_distances(spec, 1e-6, 9)) {
        if (pd.min_distance < 1e-9) {
          throw ValidationError("copies " + std::to_string(pd.i) + " and " + std::to_string(pd.j) +
                                " overlap; the support must be embedded");
        }
      }
    }
    return;
  }

  const auto& ps = spec.point_set();
  if (ps.chains.empty()) throw ValidationError("point set has no atoms");
  const int dim = static_cast<int>(ps.chains.front().origin.size());
  for (const auto& chain : ps.chains) {
    if (static_cast<int>(chain.origin.size()) != dim) throw ValidationError("chain dimension mismatch");
    if (chain.mass <= 0.0) throw ValidationError("atom masses must be positive");
    if (chain.step < 0.0) throw ValidationError("lattice step must be non-negative");
    if (chain.step > 0.0 && std::abs(chain.direction.norm() - 1.0) > 1e-9) {
      throw ValidationError("lattice direction must be a unit vector");
    }
  }
  // Distinct atoms within a window around the origin.
  std::vector<Vec> atoms;
  for (const auto& chain : ps.chains) {
    if (chain.step == 0.0) {
      atoms.push_back(chain.origin);
    } else {
      for (int k = -3; k <= 3; ++k) atoms.push_back(chain.origin + (chain.step * k) * chain.direction);
    }
  }
  for (size_t a = 0; a < atoms.size(); ++a) {
    for (size_t b = a + 1; b < atoms.size(); ++b) {
      if ((atoms[a] - atoms[b]).norm() < 1e-12) {
        throw ValidationError("coincident atoms in the point set");
      }
    }
  }
}

// --- generators ----------------------------------------------------------------

SupportSpec gen_line_lebesgue(int dim) {
  curves::HelixParams line;
  line.ambient_dimension = dim;
  line.drift = 1.0;
  CurveUnionSpec cu;
  cu.base = std::make_shared<HelixCurve>(line);
  cu.copies = {Isometry::identity(dim)};
  return SupportSpec{cu};
}

SupportSpec gen_line_lattice(double a, int dim) {
  if (a <= 0.0) throw std::invalid_argument("lattice step must be positive");
  PointSetSpec ps;
  Vec origin = Vec::Zero(dim);
  Vec dir = Vec::Zero(dim);
  dir[0] = 1.0;
  ps.chains.push_back(PointChain{origin, dir, a, 1.0});
  return SupportSpec{ps};
}

SupportSpec gen_line_double_lattice(double a, double b, int dim) {
  if (!(0.0 < b && b < a)) throw std::invalid_argument("double lattice requires 0 < b < a");
  SupportSpec spec = gen_line_lattice(a, dim);
  auto& ps = std::get<PointSetSpec>(spec.payload);
  PointChain shifted = ps.chains.front();
  shifted.origin[0] = b;
  ps.chains.push_back(shifted);
  return spec;
}

SupportSpec gen_ngon(int n, double R, int phases, double offset) {
  if (n < 2) throw std::invalid_argument("n-gon needs n >= 2");
  if (R <= 0.0) throw std::invalid_argument("circumradius must be positive");
  if (phases != 1 && phases != 2) throw std::invalid_argument("phases must be 1 or 2");
  PointSetSpec ps;
  for (int phase = 0; phase < phases; ++phase) {
    const double base = phase * offset;
    for (int k = 0; k < n; ++k) {
      const double theta = base + 2.0 * kPi * k / n;
      Vec p(2);
      p << R * std::cos(theta), R * std::sin(theta);
      ps.chains.push_back(PointChain{p, Vec::Zero(2), 0.0, 1.0});
    }
  }
  return SupportSpec{ps};
}

SupportSpec gen_prop3d(double r1, double alpha, double b, int n, double a) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (b <= 0.0) throw std::invalid_argument("drift must be positive");
  const double speed_sq = r1 * r1 * alpha * alpha + b * b;
  if (std::abs(speed_sq - 1.0) > 1e-9) {
    throw std::invalid_argument("helix parameters must satisfy r1^2 alpha^2 + b^2 = 1");
  }
  const double pitch = 2.0 * kPi * b / std::abs(alpha);
  const double cell = pitch / n;
  if (!(0.0 <= a && a < cell)) {
    throw std::invalid_argument("shift a must lie in [0, pitch/n)");
  }

  curves::HelixParams base;
  base.ambient_dimension = 3;
  base.blocks = {curves::HelixBlock{r1, alpha}};
  base.drift = b;

  CurveUnionSpec cu;
  cu.base = std::make_shared<HelixCurve>(base);
  // Axial translates by (pitch/n) Z and its shift by a; translating by a
  // full pitch maps the helix onto itself, so k runs over one pitch only.
  for (int k = 0; k < n; ++k) {
    Vec t = Vec::Zero(3);
    t[2] = k * cell;
    cu.copies.push_back(Isometry::translate(t));
    if (a > 0.0) {
      Vec ts = Vec::Zero(3);
      ts[2] = a + k * cell;
      cu.copies.push_back(Isometry::translate(ts));
    }
  }
  return SupportSpec{cu};
}

}  // namespace udm::measure
