#include "vharm/geometry/manifold.hpp"

#include <cmath>

#include "vharm/errors.hpp"

namespace vharm {

namespace {

constexpr double kOriginTol = 1e-14;
// Below this chart radius the rotationally symmetric formulas lose precision;
// Christoffel symbols are then scaled linearly from this radius and Ricci is
// frozen at it (both are smooth and respectively O(r) and O(1) near 0).
constexpr double kSmallRadius = 1e-3;

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::hyperbolic: return "hyperbolic";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::rotationally_symmetric: return "rotationally_symmetric";
  }
  return "euclidean";
}

WarpProfile WarpProfile::flat() {
  return {"flat", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

WarpProfile WarpProfile::hyperbolic(double kappa) {
  if (!(kappa < 0)) throw InvalidConfigurationError("hyperbolic warp needs kappa < 0");
  const double s = std::sqrt(-kappa);
  return {"hyperbolic", [s](double r) { return std::sinh(s * r) / s; }, [s](double r) { return std::cosh(s * r); },
          [s](double r) { return s * std::sinh(s * r); }};
}

WarpProfile WarpProfile::spherical(double kappa) {
  if (!(kappa > 0)) throw InvalidConfigurationError("spherical warp needs kappa > 0");
  const double s = std::sqrt(kappa);
  WarpProfile w{"spherical", [s](double r) { return std::sin(s * r) / s; }, [s](double r) { return std::cos(s * r); },
                [s](double r) { return -s * std::sin(s * r); }};
  w.cut_radius = M_PI / s;
  return w;
}

WarpProfile WarpProfile::cubic(double c) {
  if (c < 0) throw InvalidConfigurationError("cubic warp needs c >= 0 to stay a global chart");
  return {"cubic", [c](double r) { return r + c * r * r * r; }, [c](double r) { return 1.0 + 3.0 * c * r * r; },
          [c](double r) { return 6.0 * c * r; }};
}

ManifoldModel::ManifoldModel(int n, ManifoldKind kind, double kappa) : dim_(n), kind_(kind), kappa_(kappa) {
  if (n < 1 || n + 1 > kMaxDim) throw InvalidConfigurationError("manifold dimension out of supported range");
}

ManifoldModel ManifoldModel::euclidean(int n) { return ManifoldModel(n, ManifoldKind::euclidean, 0.0); }

ManifoldModel ManifoldModel::hyperbolic(int n, double kappa) {
  if (!(kappa < 0)) throw InvalidConfigurationError("hyperbolic kind needs kappa < 0");
  return ManifoldModel(n, ManifoldKind::hyperbolic, kappa);
}

ManifoldModel ManifoldModel::sphere(int n, double kappa) {
  if (!(kappa > 0)) throw InvalidConfigurationError("sphere kind needs kappa > 0");
  return ManifoldModel(n, ManifoldKind::sphere, kappa);
}

ManifoldModel ManifoldModel::rotationally_symmetric(int n, WarpProfile warp) {
  if (!warp.phi || !warp.dphi || !warp.ddphi) throw InvalidConfigurationError("warp profile is incomplete");
  ManifoldModel m(n, ManifoldKind::rotationally_symmetric, std::numeric_limits<double>::quiet_NaN());
  m.warp_ = std::move(warp);
  return m;
}

double ManifoldModel::cut_locus_radius() const noexcept {
  if (kind_ == ManifoldKind::sphere) return M_PI / std::sqrt(kappa_);
  if (warp_) return warp_->cut_radius;
  return std::numeric_limits<double>::infinity();
}

std::optional<double> ManifoldModel::sectional_bound() const noexcept {
  if (constant_curvature()) return kappa_;
  return std::nullopt;
}

bool ManifoldModel::in_chart(const Point& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  if (kind_ == ManifoldKind::hyperbolic) return 1.0 + kappa_ * x.squaredNorm() > 1e-12;
  if (warp_) return x.norm() < warp_->cut_radius;
  return true;
}

void ManifoldModel::require_in_chart(const Point& x) const {
  if (!in_chart(x)) throw DomainError("point outside the chart domain of the " + to_string(kind_) + " model");
}

double ManifoldModel::conformal_factor(const Point& x) const {
  if (kind_ == ManifoldKind::euclidean) return 1.0;
  if (!conformal()) throw UnsupportedConfigurationError("conformal factor requested for a non-conformal chart");
  return 2.0 / (1.0 + kappa_ * x.squaredNorm());
}

Mat ManifoldModel::metric_at(const Point& x) const {
  require_in_chart(x);
  const Mat I = Mat::Identity(dim_, dim_);
  if (kind_ == ManifoldKind::euclidean) return I;
  if (conformal()) {
    const double l = conformal_factor(x);
    return l * l * I;
  }
  const double r = x.norm();
  if (r < kOriginTol) return I;
  const Vec u = x / r;
  const double q = warp_->phi(r) / r;
  return q * q * (I - u * u.transpose()) + u * u.transpose();
}

Mat ManifoldModel::inverse_metric_at(const Point& x) const {
  require_in_chart(x);
  const Mat I = Mat::Identity(dim_, dim_);
  if (kind_ == ManifoldKind::euclidean) return I;
  if (conformal()) {
    const double l = conformal_factor(x);
    return I / (l * l);
  }
  const double r = x.norm();
  if (r < kOriginTol) return I;
  const Vec u = x / r;
  const double q = warp_->phi(r) / r;
  if (!(q > 0)) throw DegenerateMetricError("warp profile vanishes away from the origin");
  return (I - u * u.transpose()) / (q * q) + u * u.transpose();
}

double ManifoldModel::inner(const Point& x, const Vec& a, const Vec& b) const {
  if (kind_ == ManifoldKind::euclidean) return a.dot(b);
  if (conformal()) {
    const double l = conformal_factor(x);
    return l * l * a.dot(b);
  }
  return a.dot(metric_at(x) * b);
}

double ManifoldModel::norm(const Point& x, const Vec& v) const { return std::sqrt(std::max(0.0, inner(x, v, v))); }

Christoffel ManifoldModel::rotsym_christoffel_raw(const Point& x) const {
  const int n = dim_;
  Christoffel G;
  G.dim = n;
  const double r = x.norm();
  const double phi = warp_->phi(r), dphi = warp_->dphi(r);
  const double q = phi / r;
  const double psi = q * q;
  const double dpsi = 2.0 * q * (dphi * r - phi) / (r * r);
  const double chi = (1.0 - psi) / (r * r);
  const double dchi = -dpsi / (r * r) - 2.0 * (1.0 - psi) / (r * r * r);
  // dg[k](i,j) = d_k g_ij
  std::array<Mat, kMaxDim> dg;
  for (int k = 0; k < n; ++k) {
    dg[k] = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dchi / r * x(k) * x(i) * x(j);
        if (i == j) v += dpsi / r * x(k);
        if (i == k) v += chi * x(j);
        if (j == k) v += chi * x(i);
        dg[k](i, j) = v;
      }
  }
  const Mat ginv = inverse_metric_at(x);
  for (int m = 0; m < n; ++m) G.upper[m] = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double first = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        for (int m = 0; m < n; ++m) G.upper[m](i, j) += ginv(m, l) * first;
      }
  for (int m = 0; m < n; ++m) G.upper[m] = 0.5 * (G.upper[m] + G.upper[m].transpose()).eval();
  return G;
}

Christoffel ManifoldModel::christoffel(const Point& x) const {
  require_in_chart(x);
  const int n = dim_;
  Christoffel G;
  G.dim = n;
  if (kind_ == ManifoldKind::euclidean) {
    for (int k = 0; k < n; ++k) G.upper[k] = Mat::Zero(n, n);
    return G;
  }
  if (conformal()) {
    // Gamma^k_ij = d_ij.. with a = grad log lambda: delta_ik a_j + delta_jk a_i - delta_ij a_k
    const Vec a = -2.0 * kappa_ * x / (1.0 + kappa_ * x.squaredNorm());
    for (int k = 0; k < n; ++k) {
      Mat& M = G.upper[k];
      M = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        M(k, i) += a(i);
        M(i, k) += a(i);
        M(i, i) -= a(k);
      }
    }
    return G;
  }
  const double r = x.norm();
  if (r >= kSmallRadius) return rotsym_christoffel_raw(x);
  if (r < kOriginTol) {
    for (int k = 0; k < n; ++k) G.upper[k] = Mat::Zero(n, n);
    return G;
  }
  Christoffel far = rotsym_christoffel_raw(Point(x * (kSmallRadius / r)));
  for (int k = 0; k < n; ++k) far.upper[k] *= r / kSmallRadius;
  return far;
}

Mat ManifoldModel::ricci(const Point& x) const {
  require_in_chart(x);
  const int n = dim_;
  if (kind_ == ManifoldKind::euclidean) return Mat::Zero(n, n);
  if (conformal()) return kappa_ * (n - 1) * metric_at(x);
  double r = x.norm();
  const Mat I = Mat::Identity(n, n);
  const double re = std::max(r, kSmallRadius);
  const double phi = warp_->phi(re), dphi = warp_->dphi(re), ddphi = warp_->ddphi(re);
  const double radial = -(n - 1) * ddphi / phi;
  const double tangential = -ddphi / phi + (n - 2) * (1.0 - dphi * dphi) / (phi * phi);
  if (r < kOriginTol) return radial * I;
  const Vec u = x / r;
  const double q = warp_->phi(r) / r;
  const Mat P = u * u.transpose();
  return radial * P + tangential * q * q * (I - P);
}

double ManifoldModel::distance_from_origin(const Point& x) const {
  require_in_chart(x);
  const double rho = x.norm();
  switch (kind_) {
    case ManifoldKind::euclidean:
    case ManifoldKind::rotationally_symmetric: return rho;
    case ManifoldKind::sphere: {
      const double s = std::sqrt(kappa_);
      return 2.0 / s * std::atan(s * rho);
    }
    case ManifoldKind::hyperbolic: {
      const double s = std::sqrt(-kappa_);
      return 2.0 / s * std::atanh(s * rho);
    }
  }
  return rho;
}

double ManifoldModel::chart_radius_at(double r) const {
  if (r < 0) throw DomainError("negative radius");
  if (r >= cut_locus_radius()) throw CutLocusError("radius at or beyond the cut locus");
  switch (kind_) {
    case ManifoldKind::euclidean:
    case ManifoldKind::rotationally_symmetric: return r;
    case ManifoldKind::sphere: {
      const double s = std::sqrt(kappa_);
      return std::tan(0.5 * s * r) / s;
    }
    case ManifoldKind::hyperbolic: {
      const double s = std::sqrt(-kappa_);
      return std::tanh(0.5 * s * r) / s;
    }
  }
  return r;
}

double ManifoldModel::ambient_inner(const Vec& a, const Vec& b) const {
  double s = a.head(dim_).dot(b.head(dim_));
  const double last = a(dim_) * b(dim_);
  return kind_ == ManifoldKind::hyperbolic ? s - last : s + last;
}

Vec ManifoldModel::embed(const Point& x) const {
  if (!conformal()) throw UnsupportedConfigurationError("embedding defined for constant nonzero curvature only");
  require_in_chart(x);
  const double l = conformal_factor(x);
  const double R = 1.0 / std::sqrt(std::abs(kappa_));
  Vec y(dim_ + 1);
  y.head(dim_) = l * x;
  y(dim_) = R * (l - 1.0);
  return y;
}

Point ManifoldModel::unembed(const Vec& y) const {
  if (!conformal()) throw UnsupportedConfigurationError("embedding defined for constant nonzero curvature only");
  const double s = std::sqrt(std::abs(kappa_));
  const double denom = 1.0 + s * y(dim_);
  if (!(denom > 1e-12)) throw DomainError("point at the pole excluded from the stereographic chart");
  return Point(y.head(dim_) / denom);
}

Mat ManifoldModel::embedding_jacobian(const Point& x) const {
  const double l = conformal_factor(x);
  const double R = 1.0 / std::sqrt(std::abs(kappa_));
  Mat J(dim_ + 1, dim_);
  // d lambda / dx_j = -kappa lambda^2 x_j
  const Vec dl = -kappa_ * l * l * x;
  J.topRows(dim_) = l * Mat::Identity(dim_, dim_) + x * dl.transpose();
  J.row(dim_) = R * dl.transpose();
  return J;
}

Vec ManifoldModel::ambient_to_chart(const Point& x, const Vec& w) const {
  const Mat J = embedding_jacobian(x);
  Vec ew = w;
  if (kind_ == ManifoldKind::hyperbolic) ew(dim_) = -ew(dim_);
  const double l = conformal_factor(x);
  return J.transpose() * ew / (l * l);
}

double ManifoldModel::distance(const Point& p, const Point& x) const {
  require_in_chart(p);
  require_in_chart(x);
  switch (kind_) {
    case ManifoldKind::euclidean: return (x - p).norm();
    case ManifoldKind::rotationally_symmetric:
      if (p.norm() < kOriginTol) return x.norm();
      if (x.norm() < kOriginTol) return p.norm();
      throw UnsupportedConfigurationError("rotationally symmetric distance is available from the origin only");
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: {
      const Vec d = embed(x) - embed(p);
      const double s = std::sqrt(std::abs(kappa_));
      const double chord = std::sqrt(std::max(0.0, ambient_inner(d, d)));
      if (kind_ == ManifoldKind::sphere) return 2.0 / s * std::asin(std::min(1.0, 0.5 * s * chord));
      return 2.0 / s * std::asinh(0.5 * s * chord);
    }
  }
  return 0.0;
}

Point ManifoldModel::exp(const Point& x, const Vec& v) const {
  require_in_chart(x);
  switch (kind_) {
    case ManifoldKind::euclidean: return x + v;
    case ManifoldKind::rotationally_symmetric:
      if (x.norm() < kOriginTol) {
        if (v.norm() >= cut_locus_radius()) throw CutLocusError("exponential map beyond the cut radius");
        return v;
      }
      throw UnsupportedConfigurationError("rotationally symmetric exp map is available from the origin only");
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: break;
  }
  const Vec P = embed(x);
  const Vec W = embedding_jacobian(x) * v;
  const double speed = std::sqrt(std::max(0.0, ambient_inner(W, W)));
  if (speed < 1e-300) return x;
  const double s = std::sqrt(std::abs(kappa_));
  double cs, sn;
  if (kind_ == ManifoldKind::sphere) {
    cs = std::cos(s * speed);
    sn = std::sin(s * speed) / s;
  } else {
    cs = std::cosh(s * speed);
    sn = std::sinh(s * speed) / s;
  }
  return unembed(Vec(cs * P + sn * W / speed));
}

Vec ManifoldModel::log(const Point& x, const Point& y) const {
  require_in_chart(x);
  require_in_chart(y);
  switch (kind_) {
    case ManifoldKind::euclidean: return y - x;
    case ManifoldKind::rotationally_symmetric:
      if (x.norm() < kOriginTol) return y;
      throw UnsupportedConfigurationError("rotationally symmetric log map is available from the origin only");
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: break;
  }
  const Vec P = embed(x);
  const Vec Q = embed(y);
  const double pp = ambient_inner(P, P);
  // Component of Q - P tangent at P; parallel to the initial velocity.
  const Vec D = Q - P;
  const Vec T = D - (ambient_inner(P, D) / pp) * P;
  const double tn = std::sqrt(std::max(0.0, ambient_inner(T, T)));
  if (tn < 1e-300) return Vec::Zero(dim_);
  const double d = distance(x, y);
  if (kind_ == ManifoldKind::sphere && d >= cut_locus_radius() * (1.0 - 1e-12))
    throw CutLocusError("log map at the antipodal point");
  return ambient_to_chart(x, Vec(T * (d / tn)));
}

Point ManifoldModel::geodesic_point(const Point& p, const Vec& u, double t) const {
  return exp(p, Vec(t * u));
}

Vec ManifoldModel::geodesic_velocity(const Point& p, const Vec& u, double t) const {
  require_in_chart(p);
  switch (kind_) {
    case ManifoldKind::euclidean: return u;
    case ManifoldKind::rotationally_symmetric:
      if (p.norm() < kOriginTol) return u;
      throw UnsupportedConfigurationError("rotationally symmetric geodesics are available from the origin only");
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: break;
  }
  const Vec P = embed(p);
  const Vec W = embedding_jacobian(p) * u;
  const double speed = std::sqrt(std::max(0.0, ambient_inner(W, W)));
  const Vec U = W / speed;
  const double s = std::sqrt(std::abs(kappa_));
  const double T = t * speed;
  double cs, sn;
  if (kind_ == ManifoldKind::sphere) {
    cs = std::cos(s * T);
    sn = std::sin(s * T) / s;
  } else {
    cs = std::cosh(s * T);
    sn = std::sinh(s * T) / s;
  }
  const Vec Y = cs * P + sn * U;
  const Vec dY = speed * (-kappa_ * sn * P + cs * U);
  return ambient_to_chart(unembed(Y), dY);
}

Vec ManifoldModel::laplacian_drift(const Point& x) const {
  switch (kind_) {
    case ManifoldKind::euclidean: return Vec::Zero(dim_);
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: {
      const double l = conformal_factor(x);
      const Vec a = -2.0 * kappa_ * x / (1.0 + kappa_ * x.squaredNorm());
      return (dim_ - 2) * a / (l * l);
    }
    case ManifoldKind::rotationally_symmetric: break;
  }
  const Christoffel G = christoffel(x);
  const Mat ginv = inverse_metric_at(x);
  Vec b(dim_);
  for (int k = 0; k < dim_; ++k) b(k) = -(ginv.cwiseProduct(G.upper[k])).sum();
  return b;
}

Mat ManifoldModel::noise_factor(const Point& x) const {
  const Mat I = Mat::Identity(dim_, dim_);
  switch (kind_) {
    case ManifoldKind::euclidean: return I;
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: return I / conformal_factor(x);
    case ManifoldKind::rotationally_symmetric: break;
  }
  const double r = x.norm();
  if (r < kOriginTol) return I;
  const Vec u = x / r;
  const double q = warp_->phi(r) / r;
  return (I - u * u.transpose()) / q + u * u.transpose();
}

double ManifoldModel::curvature_term(const Mat& gram) const {
  if (!constant_curvature())
    throw UnsupportedConfigurationError("target curvature available for constant-curvature models only");
  const double tr = gram.trace();
  return kappa_ * (tr * tr - gram.cwiseProduct(gram).sum());
}

}  // namespace vharm
