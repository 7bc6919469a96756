#include "udm/curves.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace udm::curves {

namespace {

constexpr double kPi = 3.14159265358979323846;

void orthonormalize_rows(Mat& frame) {
  const int d = static_cast<int>(frame.rows());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      frame.row(i) -= frame.row(i).dot(frame.row(j)) * frame.row(j);
    }
    frame.row(i).normalize();
  }
}

// Modified Gram-Schmidt QR of the derivative matrix. Diagonal entries of R
// are forced positive except the last in the full-rank square case, whose
// sign is fixed so that det(Q) = +1 (orientation of E_d).
void frenet_qr(const Mat& D, Mat& Q, Mat& R) {
  const int d = static_cast<int>(D.rows());
  const int m = static_cast<int>(D.cols());
  Q = Mat::Zero(d, m);
  R = Mat::Zero(m, m);
  Mat work = D;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < j; ++i) {
      R(i, j) = Q.col(i).dot(work.col(j));
      work.col(j) -= R(i, j) * Q.col(i);
    }
    R(j, j) = work.col(j).norm();
    if (R(j, j) > 0.0) Q.col(j) = work.col(j) / R(j, j);
  }
  if (m == d && R(d - 1, d - 1) > 0.0) {
    const double det = D.determinant();
    if (det < 0.0) {
      Q.col(d - 1) = -Q.col(d - 1);
      R(d - 1, d - 1) = -R(d - 1, d - 1);
    }
  }
}

std::optional<std::pair<std::int64_t, std::int64_t>> rational_approx(double x, double rel_tol,
                                                                     std::int64_t max_den) {
  // Continued-fraction convergents.
  std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(v);
    if (std::abs(fl) > 1e15) break;
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t p2 = a * p0 + p1;
    const std::int64_t q2 = a * q0 + q1;
    if (q2 > max_den) break;
    p1 = p0; q1 = q0; p0 = p2; q0 = q2;
    if (q0 > 0 && std::abs(x - static_cast<double>(p0) / static_cast<double>(q0)) <=
                      rel_tol * std::max(1.0, std::abs(x))) {
      return std::make_pair(p0, q0);
    }
    const double frac = v - fl;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace

void HelixParams::validate() const {
  if (ambient_dimension < 1) throw std::invalid_argument("ambient dimension must be >= 1");
  if (drift < 0.0) throw std::invalid_argument("drift must be non-negative");
  if (span_dimension() > ambient_dimension) {
    throw std::invalid_argument("rotation blocks and drift exceed the ambient dimension");
  }
  double speed_sq = drift * drift;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].radius <= 0.0) throw std::invalid_argument("block radius must be positive");
    if (blocks[i].angular_speed == 0.0) throw std::invalid_argument("block angular speed must be nonzero");
    for (size_t j = 0; j < i; ++j) {
      const double ai = std::abs(blocks[i].angular_speed);
      const double aj = std::abs(blocks[j].angular_speed);
      if (std::abs(ai - aj) <= 1e-12 * std::max(ai, aj)) {
        throw std::invalid_argument("block angular speeds must be distinct in absolute value");
      }
    }
    speed_sq += blocks[i].radius * blocks[i].radius * blocks[i].angular_speed * blocks[i].angular_speed;
  }
  if (speed_sq == 0.0) throw std::invalid_argument("degenerate parametrization (zero speed)");
  if (std::abs(speed_sq - 1.0) > 1e-9) {
    throw std::invalid_argument("parametrization is not unit speed: |gamma'|^2 = " + std::to_string(speed_sq));
  }
}

Vec eval_helix(const HelixParams& p, double t) { return helix_derivative(p, t, 0); }

Vec helix_derivative(const HelixParams& p, double t, int order) {
  if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
  Vec out = Vec::Zero(p.ambient_dimension);
  const double phase_shift = 0.5 * kPi * order;
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& b = p.blocks[i];
    const double amp = b.radius * std::pow(b.angular_speed, order);
    const double ph = b.angular_speed * t + phase_shift;
    out[2 * static_cast<Eigen::Index>(i)] = amp * std::cos(ph);
    out[2 * static_cast<Eigen::Index>(i) + 1] = amp * std::sin(ph);
  }
  if (p.drift > 0.0) {
    const auto z = static_cast<Eigen::Index>(2 * p.blocks.size());
    if (order == 0) out[z] = p.drift * t;
    if (order == 1) out[z] = p.drift;
  }
  return out;
}

Mat frenet_matrix(const CurvatureVector& kv) {
  const int d = kv.dimension();
  Mat k = Mat::Zero(d, d);
  for (int j = 0; j < d - 1; ++j) {
    k(j, j + 1) = kv.kappas[static_cast<size_t>(j)];
    k(j + 1, j) = -kv.kappas[static_cast<size_t>(j)];
  }
  return k;
}

CurvatureVector helix_curvatures(const HelixParams& p) {
  p.validate();
  const int d = p.ambient_dimension;
  const int m = p.span_dimension();
  Mat derivs(d, m);
  for (int k = 1; k <= m; ++k) derivs.col(k - 1) = helix_derivative(p, 0.0, k);
  Mat q, r;
  frenet_qr(derivs, q, r);
  CurvatureVector kv;
  kv.kappas.assign(static_cast<size_t>(d - 1), 0.0);
  for (int j = 0; j + 1 < m; ++j) {
    if (r(j, j) == 0.0) break;
    kv.kappas[static_cast<size_t>(j)] = r(j + 1, j + 1) / r(j, j);
  }
  return kv;
}

HelixParams curvatures_to_helix(const CurvatureVector& kv) {
  const int d = kv.dimension();
  // Trailing zeros lower the affine span; interior zeros are degenerate.
  int span = d;
  while (span >= 2 && kv.kappas[static_cast<size_t>(span - 2)] == 0.0) --span;
  for (int j = 0; j + 1 < span; ++j) {
    if (kv.kappas[static_cast<size_t>(j)] == 0.0) {
      throw DegenerateCurvaturesError("interior curvature kappa_" + std::to_string(j + 1) +
                                      " vanishes; split at the lower-dimensional span");
    }
    if (j + 1 < span - 1 && kv.kappas[static_cast<size_t>(j)] < 0.0) {
      throw DegenerateCurvaturesError("curvatures below the top index must be positive");
    }
  }

  HelixParams params;
  params.ambient_dimension = d;
  if (span == 1) {
    params.drift = 1.0;  // straight line
    return params;
  }

  CurvatureVector active;
  active.kappas.assign(kv.kappas.begin(), kv.kappas.begin() + (span - 1));
  const Mat frame_ode = frenet_matrix(active);

  // Real Schur form of the skew matrix: orthogonal Q with Q^T K Q block
  // diagonal, 2x2 rotation generators plus a kernel line when span is odd.
  Eigen::RealSchur<Mat> schur(frame_ode);
  const Mat t = schur.matrixT();
  const Mat u = schur.matrixU();
  const Vec w = u.row(0).transpose();  // e_1 in the invariant basis

  double drift_sq = 0.0;
  int i = 0;
  while (i < span) {
    if (i + 1 < span && std::abs(t(i + 1, i)) > 1e-10) {
      const double alpha = std::abs(t(i, i + 1));
      const double amplitude = std::hypot(w[i], w[i + 1]);
      if (alpha <= 0.0 || amplitude <= 1e-12) {
        throw DegenerateCurvaturesError("invariant-plane projection degenerates");
      }
      params.blocks.push_back(HelixBlock{amplitude / alpha, alpha});
      i += 2;
    } else {
      drift_sq += w[i] * w[i];
      i += 1;
    }
  }
  params.drift = std::sqrt(drift_sq);
  std::sort(params.blocks.begin(), params.blocks.end(),
            [](const HelixBlock& a, const HelixBlock& b) { return a.angular_speed < b.angular_speed; });

  // The eigen-construction reproduces |kappa_j|; the last curvature's sign
  // selects between a curve and its mirror image.
  auto matches = [&](const HelixParams& candidate) {
    const CurvatureVector est = helix_curvatures(candidate);
    for (int j = 0; j + 1 < span; ++j) {
      const double want = kv.kappas[static_cast<size_t>(j)];
      const double got = est.kappas[static_cast<size_t>(j)];
      if (std::abs(want - got) > 1e-8 * std::max(1.0, std::abs(want))) return false;
    }
    return true;
  };
  if (!matches(params)) {
    params.blocks.back().angular_speed = -params.blocks.back().angular_speed;
    if (!matches(params)) {
      throw DegenerateCurvaturesError("could not realize the requested curvature vector");
    }
  }
  return params;
}

namespace {

struct FrenetOde {
  const std::function<std::vector<double>(double)>& kappas;
  int dim;

  void rhs(double s, const Vec& pos, const Mat& frame, Vec& dpos, Mat& dframe) const {
    (void)pos;
    const std::vector<double> k = kappas(s);
    dpos = frame.row(0).transpose();
    dframe = Mat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
      if (j < dim - 1) dframe.row(j) += k[static_cast<size_t>(j)] * frame.row(j + 1);
      if (j > 0) dframe.row(j) -= k[static_cast<size_t>(j - 1)] * frame.row(j - 1);
    }
  }
};

}  // namespace

std::vector<FrenetState> integrate_frenet(const std::function<std::vector<double>(double)>& kappas,
                                          int dimension, double s_end, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  const double h = s_end / steps;
  const FrenetOde ode{kappas, dimension};

  std::vector<FrenetState> out;
  out.reserve(static_cast<size_t>(steps) + 1);
  FrenetState st;
  st.s = 0.0;
  st.position = Vec::Zero(dimension);
  st.frame = Mat::Identity(dimension, dimension);
  out.push_back(st);

  Vec kp1, kp2, kp3, kp4;
  Mat kf1, kf2, kf3, kf4;
  for (int n = 0; n < steps; ++n) {
    const double s = st.s;
    ode.rhs(s, st.position, st.frame, kp1, kf1);
    ode.rhs(s + 0.5 * h, st.position + 0.5 * h * kp1, st.frame + 0.5 * h * kf1, kp2, kf2);
    ode.rhs(s + 0.5 * h, st.position + 0.5 * h * kp2, st.frame + 0.5 * h * kf2, kp3, kf3);
    ode.rhs(s + h, st.position + h * kp3, st.frame + h * kf3, kp4, kf4);
    st.position += (h / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
    st.frame += (h / 6.0) * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4);
    st.s = s + h;
    orthonormalize_rows(st.frame);
    out.push_back(st);
  }
  return out;
}

std::vector<FrenetState> integrate_frenet(const CurvatureVector& kv, double s_end, int steps) {
  const std::vector<double> constants = kv.kappas;
  return integrate_frenet([constants](double) { return constants; }, kv.dimension(), s_end, steps);
}

std::vector<double> central_difference_weights(int m, int half_width, double h) {
  // Fornberg's recursion on the symmetric stencil {-w..w}, evaluated at 0.
  const int w = half_width;
  if (m < 0 || w < (m + 1) / 2) throw std::invalid_argument("stencil too small for derivative order");
  const int n = 2 * w;
  std::vector<double> x(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) x[static_cast<size_t>(i)] = (i - w) * h;

  std::vector<std::vector<double>> c(static_cast<size_t>(n) + 1,
                                     std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0];
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<size_t>(i)];
    for (int j = 0; j <= i - 1; ++j) {
      const double c3 = x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[static_cast<size_t>(i)][static_cast<size_t>(k)] =
              c1 * (k * c[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)] -
                    c5 * c[static_cast<size_t>(i - 1)][static_cast<size_t>(k)]) / c2;
        }
        c[static_cast<size_t>(i)][0] = -c1 * c5 * c[static_cast<size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[static_cast<size_t>(j)][static_cast<size_t>(k)] =
            (c4 * c[static_cast<size_t>(j)][static_cast<size_t>(k)] -
             k * c[static_cast<size_t>(j)][static_cast<size_t>(k - 1)]) / c3;
      }
      c[static_cast<size_t>(j)][0] = c4 * c[static_cast<size_t>(j)][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out[static_cast<size_t>(i)] = c[static_cast<size_t>(i)][static_cast<size_t>(m)];
  return out;
}

std::vector<CurvatureEstimate> estimate_curvatures(const std::vector<Vec>& samples, double spacing) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const int d = static_cast<int>(samples.front().size());
  const int n = static_cast<int>(samples.size());
  if (n < 2 * d + 1) throw std::invalid_argument("need at least 2d+1 samples");
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");

  // Minimal symmetric stencils keep every derivative at O(h^2), so the
  // curvature estimates share a single convergence order.
  std::vector<std::vector<double>> weights(static_cast<size_t>(d) + 1);
  std::vector<double> amplification(static_cast<size_t>(d) + 1, 0.0);
  for (int m = 1; m <= d; ++m) {
    weights[static_cast<size_t>(m)] = central_difference_weights(m, (m + 1) / 2, spacing);
    for (double wgt : weights[static_cast<size_t>(m)]) amplification[static_cast<size_t>(m)] += std::abs(wgt);
  }

  double coord_scale = 0.0;
  for (const auto& p : samples) coord_scale = std::max(coord_scale, p.lpNorm<Eigen::Infinity>());

  std::vector<CurvatureEstimate> out;
  for (int center = d; center < n - d; ++center) {
    Mat derivs(d, d);
    for (int m = 1; m <= d; ++m) {
      const auto& wgt = weights[static_cast<size_t>(m)];
      const int w = (static_cast<int>(wgt.size()) - 1) / 2;
      Vec acc = Vec::Zero(d);
      for (int off = -w; off <= w; ++off) {
        acc += wgt[static_cast<size_t>(off + w)] * samples[static_cast<size_t>(center + off)];
      }
      derivs.col(m - 1) = acc;
    }

    Mat q, r;
    frenet_qr(derivs, q, r);

    CurvatureEstimate est;
    est.sample_index = center;
    est.s = center * spacing;
    est.kappas.assign(static_cast<size_t>(d - 1), 0.0);
    est.rank = d;
    for (int j = 0; j < d; ++j) {
      const double noise_floor = 8.0 * 2.22e-16 * amplification[static_cast<size_t>(j + 1)] *
                                 std::max(coord_scale, 1e-30);
      if (std::abs(r(j, j)) <= 10.0 * noise_floor) {
        est.rank = j;
        if (std::abs(r(j, j)) > noise_floor) est.degenerate = true;  // ambiguous pivot
        break;
      }
    }
    for (int j = 0; j + 1 < est.rank; ++j) {
      est.kappas[static_cast<size_t>(j)] = r(j + 1, j + 1) / r(j, j);
    }
    out.push_back(std::move(est));
  }
  return out;
}

ToricCheck is_toric_knot(const HelixParams& p) {
  ToricCheck check;
  if (p.drift > 0.0 || p.blocks.empty()) return check;  // drift => unbounded, no period
  const double base = p.blocks.front().angular_speed;
  std::int64_t lcm = 1;
  for (const auto& b : p.blocks) {
    const auto frac = rational_approx(b.angular_speed / base, 1e-9, 1000000);
    if (!frac) return check;
    const std::int64_t q = frac->second;
    lcm = std::lcm(lcm, q);
    if (lcm > (std::int64_t{1} << 40)) return check;
  }
  check.is_knot = true;
  check.period = 2.0 * kPi * static_cast<double>(lcm) / std::abs(base);
  return check;
}

}  // namespace udm::curves
