#include "vharm/geometry/curvature.hpp"

#include <cmath>

#include "vharm/errors.hpp"
#include "vharm/random.hpp"

namespace vharm {

namespace {

void require_invertible(const ManifoldModel& manifold, const Point& x) {
  const Mat g = manifold.metric_at(x);
  const Eigen::LDLT<Mat> ldlt(g);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-300))
    throw DegenerateMetricError("metric is not invertible at the requested point");
}

double cot_k(double kappa, double r) {
  if (kappa > 0) {
    const double s = std::sqrt(kappa);
    return s / std::tan(s * r);
  }
  if (kappa < 0) {
    const double s = std::sqrt(-kappa);
    return s / std::tanh(s * r);
  }
  return 1.0 / r;
}

bool at_origin(const Point& p) { return p.norm() < 1e-14; }

ScalarField radial_chart_function(std::function<double(double)> F, std::function<double(double)> dF,
                                  std::function<double(double)> ddF) {
  return ScalarField::analytic(
      [F](const Point& x) { return F(x.norm()); },
      [dF](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) throw PoleError("distance function is not differentiable at its base point");
        return Vec(dF(rho) * x / rho);
      },
      [dF, ddF](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) throw PoleError("distance function is not differentiable at its base point");
        const Vec u = x / rho;
        const Mat P = u * u.transpose();
        const Mat I = Mat::Identity(x.size(), x.size());
        return Mat(ddF(rho) * P + dF(rho) / rho * (I - P));
      });
}

}  // namespace

Christoffel christoffel(const ManifoldModel& manifold, const Point& x) {
  require_invertible(manifold, x);
  return manifold.christoffel(x);
}

Mat ricci(const ManifoldModel& manifold, const Point& x) {
  require_invertible(manifold, x);
  return manifold.ricci(x);
}

Mat hessian_scalar(const ManifoldModel& manifold, const ScalarField& f, const Point& x) {
  manifold.require_in_chart(x);
  const Christoffel G = manifold.christoffel(x);
  const Vec df = f.gradient(x);
  Mat H = f.hessian(x);
  for (int k = 0; k < manifold.dim(); ++k) H -= df(k) * G.upper[k];
  return 0.5 * (H + H.transpose());
}

double laplacian(const ManifoldModel& manifold, const ScalarField& f, const Point& x) {
  return manifold.inverse_metric_at(x).cwiseProduct(hessian_scalar(manifold, f, x)).sum();
}

Vec metric_gradient(const ManifoldModel& manifold, const ScalarField& f, const Point& x) {
  return manifold.inverse_metric_at(x) * f.gradient(x);
}

double laplacian_V(const ManifoldModel& manifold, const DriftField& V, const ScalarField& f, const Point& x) {
  // <V, grad f> = V^k d_k f
  return laplacian(manifold, f, x) - V.at(x).dot(f.gradient(x));
}

Mat covariant_derivative(const ManifoldModel& manifold, const DriftField& V, const Point& x) {
  const Christoffel G = manifold.christoffel(x);
  const Vec v = V.at(x);
  Mat N = V.jacobian(x);
  for (int k = 0; k < manifold.dim(); ++k) N.row(k) += (G.upper[k] * v).transpose();
  return N;
}

Mat weighted_ricci_tensor(const ManifoldModel& manifold, const DriftField& V, const EffectiveDimension& m,
                          const Point& x) {
  const int n = manifold.dim();
  m.validate_for(n);
  require_invertible(manifold, x);
  Mat R = manifold.ricci(x);
  if (V.identically_zero()) return R;
  if (m.equals_dimension(n))
    throw InvalidConfigurationError("m = n requires the drift V to vanish identically");
  const Mat g = manifold.metric_at(x);
  const Mat M = g * covariant_derivative(manifold, V, x);  // M(j, i) = <nabla_i V, d_j>
  R += 0.5 * (M + M.transpose());
  const double c = m.correction_coefficient(n);
  if (c != 0.0) {
    const Vec flat = g * V.at(x);
    R -= c * flat * flat.transpose();
  }
  return R;
}

double weighted_ricci(const ManifoldModel& manifold, const DriftField& V, const EffectiveDimension& m,
                      const Point& x, const Vec& v) {
  if (v.size() != manifold.dim()) throw InputError("tangent vector has wrong dimension");
  if (v.isZero(0.0)) {
    m.validate_for(manifold.dim());
    if (m.equals_dimension(manifold.dim()) && !V.identically_zero())
      throw InvalidConfigurationError("m = n requires the drift V to vanish identically");
    return 0.0;
  }
  return v.dot(weighted_ricci_tensor(manifold, V, m, x) * v);
}

ScalarField distance_function(const ManifoldModel& manifold, const Point& p) {
  manifold.require_in_chart(p);
  const int n = manifold.dim();
  if (manifold.kind() == ManifoldKind::euclidean) {
    return ScalarField::analytic(
        [p](const Point& x) { return (x - p).norm(); },
        [p](const Point& x) {
          const double r = (x - p).norm();
          if (r == 0.0) throw PoleError("distance function is not differentiable at its base point");
          return Vec((x - p) / r);
        },
        [p, n](const Point& x) {
          const double r = (x - p).norm();
          if (r == 0.0) throw PoleError("distance function is not differentiable at its base point");
          const Vec u = (x - p) / r;
          return Mat((Mat::Identity(n, n) - u * u.transpose()) / r);
        });
  }
  if (at_origin(p)) {
    if (manifold.kind() == ManifoldKind::rotationally_symmetric)
      return radial_chart_function([](double r) { return r; }, [](double) { return 1.0; },
                                   [](double) { return 0.0; });
    const double k = manifold.kappa();
    const double s = std::sqrt(std::abs(k));
    return radial_chart_function([k, s](double rho) {
                                   return k > 0 ? 2.0 / s * std::atan(s * rho) : 2.0 / s * std::atanh(s * rho);
                                 },
                                 [k](double rho) { return 2.0 / (1.0 + k * rho * rho); },
                                 [k](double rho) {
                                   const double d = 1.0 + k * rho * rho;
                                   return -4.0 * k * rho / (d * d);
                                 });
  }
  const ManifoldModel copy = manifold;
  return ScalarField::from_function([copy, p](const Point& x) { return copy.distance(p, x); }, 1e-4);
}

ScalarField squared_distance_function(const ManifoldModel& manifold, const Point& p) {
  const ScalarField r = distance_function(manifold, p);
  return ScalarField::analytic(
      [r](const Point& x) {
        const double d = r.value(x);
        return d * d;
      },
      [r](const Point& x) {
        const double d = r.value(x);
        if (d == 0.0) return Vec(Vec::Zero(x.size()));
        return Vec(2.0 * d * r.gradient(x));
      },
      [r, manifold, p](const Point& x) {
        const double d = r.value(x);
        if (d == 0.0) return Mat(2.0 * manifold.metric_at(x));
        const Vec g = r.gradient(x);
        return Mat(2.0 * g * g.transpose() + 2.0 * d * r.hessian(x));
      });
}

Vec radial_direction(const ManifoldModel& manifold, const Point& p, const Point& x) {
  if (manifold.kind() == ManifoldKind::rotationally_symmetric) {
    if (!at_origin(p)) throw UnsupportedConfigurationError("radial direction from the origin only");
    const double r = x.norm();
    if (r == 0.0) throw PoleError("radial direction undefined at the base point");
    return x / r;
  }
  const Vec lg = manifold.log(x, p);
  const double r = manifold.norm(x, lg);
  if (r == 0.0) throw PoleError("radial direction undefined at the base point");
  return -lg / r;
}

double radial_laplacian(const ManifoldModel& manifold, const DriftField& V, const Point& p, const Point& x) {
  const int n = manifold.dim();
  double lap;
  double r;
  if (manifold.kind() == ManifoldKind::rotationally_symmetric) {
    if (!at_origin(p)) throw UnsupportedConfigurationError("radial Laplacian from the origin only");
    r = x.norm();
    if (r == 0.0) throw PoleError("radial Laplacian undefined at the base point");
    lap = (n - 1) * manifold.warp()->dphi(r) / manifold.warp()->phi(r);
  } else {
    r = manifold.distance(p, x);
    if (r == 0.0) throw PoleError("radial Laplacian undefined at the base point");
    if (r >= manifold.cut_locus_radius()) throw CutLocusError("point on the cut locus");
    lap = (n - 1) * cot_k(manifold.kappa(), r);
  }
  if (V.identically_zero()) return lap;
  return lap - manifold.inner(x, V.at(x), radial_direction(manifold, p, x));
}

double radial_laplacian_measured(const ManifoldModel& manifold, const DriftField& V, const Point& p,
                                 const Point& x) {
  return laplacian_V(manifold, V, distance_function(manifold, p), x);
}

Point random_point_in_ball(const ManifoldModel& manifold, double radius, RandomStream& rng) {
  const int n = manifold.dim();
  const double chart_radius = manifold.chart_radius_at(radius);
  Vec dir(n);
  for (int i = 0; i < n; ++i) dir(i) = rng.normal();
  dir /= dir.norm();
  const double rho = chart_radius * std::pow(rng.uniform(), 1.0 / n);
  return rho * dir;
}

Vec random_unit_vector(const ManifoldModel& manifold, const Point& x, RandomStream& rng) {
  const int n = manifold.dim();
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v / manifold.norm(x, v);
}

CurvatureSample sample_weighted_ricci(const ManifoldModel& manifold, const DriftField& V,
                                      const EffectiveDimension& m, double radius, std::size_t samples,
                                      std::uint64_t seed, double tolerance) {
  CurvatureSample out;
  out.min_value = INFINITY;
  RandomStream rng(seed, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    const Point x = random_point_in_ball(manifold, radius, rng);
    const Vec v = random_unit_vector(manifold, x, rng);
    const double value = weighted_ricci(manifold, V, m, x, v);
    if (value < out.min_value) {
      out.min_value = value;
      out.argmin_x = x;
      out.argmin_v = v;
    }
    if (value < -tolerance) ++out.negatives;
    ++out.samples;
  }
  return out;
}

}  // namespace vharm
