#include "vharm/bochner/bochner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"

namespace vharm {

namespace {

struct Derivs {
  Vec grad;
  Mat hess;
};

// Central differences of a scalar function, optionally with one Richardson step.
Derivs central_derivs(const std::function<double(const Point&)>& f, const Point& x, double h, bool richardson) {
  const int n = static_cast<int>(x.size());
  auto plain = [&](double s) {
    Derivs d{Vec(n), Mat(n, n)};
    const double f0 = f(x);
    Point y = x;
    for (int i = 0; i < n; ++i) {
      y(i) = x(i) + s;
      const double fp = f(y);
      y(i) = x(i) - s;
      const double fm = f(y);
      y(i) = x(i);
      d.grad(i) = (fp - fm) / (2 * s);
      d.hess(i, i) = (fp - 2 * f0 + fm) / (s * s);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double acc = 0;
        for (int si : {1, -1})
          for (int sj : {1, -1}) {
            y = x;
            y(i) += si * s;
            y(j) += sj * s;
            acc += si * sj * f(y);
          }
        d.hess(i, j) = d.hess(j, i) = acc / (4 * s * s);
      }
    return d;
  };
  if (!richardson) return plain(h);
  const Derivs a = plain(h);
  const Derivs b = plain(0.5 * h);
  return {(4.0 * b.grad - a.grad) / 3.0, (4.0 * b.hess - a.hess) / 3.0};
}

Mat central_jacobian(const std::function<Vec(const Point&)>& F, const Point& x, double h, bool richardson) {
  const int n = static_cast<int>(x.size());
  auto plain = [&](double s) {
    Mat J;
    Point y = x;
    for (int i = 0; i < n; ++i) {
      y(i) = x(i) + s;
      const Vec fp = F(y);
      y(i) = x(i) - s;
      const Vec fm = F(y);
      y(i) = x(i);
      if (i == 0) J.resize(fp.size(), n);
      J.col(i) = (fp - fm) / (2 * s);
    }
    return J;
  };
  if (!richardson) return plain(h);
  return ((4.0 * plain(0.5 * h) - plain(h)) / 3.0).eval();
}

// Delta_V of a scalar from its chart partials.
double weighted_laplacian(const ManifoldModel& M, const DriftField& V, const Point& x, const Derivs& d) {
  const Mat gi = M.inverse_metric_at(x);
  const Christoffel G = M.christoffel(x);
  const int n = M.dim();
  double lap = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = d.hess(i, j);
      for (int m = 0; m < n; ++m) s -= G(m, i, j) * d.grad(m);
      lap += gi(i, j) * s;
    }
  if (!V.identically_zero()) lap -= V.at(x).dot(d.grad);
  return lap;
}

double energy_density2(const SmoothMapSpec& u, const MapJet& jet, const Point& x) {
  const Mat gi = u.domain().inverse_metric_at(x);
  const Mat H = u.target().metric_at(jet.value);
  return (gi * jet.jacobian.transpose() * H * jet.jacobian).trace();
}

Vec tension_from_jet(const SmoothMapSpec& u, const DriftField& V, const MapJet& jet, const Point& x) {
  const auto S = map_hessian(u, jet, x);
  const Mat gi = u.domain().inverse_metric_at(x);
  const int k = u.target().dim();
  Vec tau(k);
  for (int a = 0; a < k; ++a) tau(a) = gi.cwiseProduct(S[a]).sum();
  if (!V.identically_zero()) tau -= jet.jacobian * V.at(x);
  return tau;
}

}  // namespace

Differential map_differential(const SmoothMapSpec& u, const Point& x) {
  const MapJet jet = u.jet(x);
  Differential d;
  d.chart = jet.jacobian;
  const Mat E = orthonormal_frame(u.domain(), x);
  const Mat F = orthonormal_frame(u.target(), jet.value);
  d.framed = F.inverse() * jet.jacobian * E;
  d.norm2 = d.framed.squaredNorm();
  return d;
}

std::array<Mat, kMaxDim> map_hessian(const SmoothMapSpec& u, const MapJet& jet, const Point& x) {
  const int n = u.domain().dim();
  const int k = u.target().dim();
  const Christoffel GM = u.domain().christoffel(x);
  const bool flat_target = u.target().kind() == ManifoldKind::euclidean;
  Christoffel GN;
  if (!flat_target) GN = u.target().christoffel(jet.value);
  const Mat& J = jet.jacobian;
  std::array<Mat, kMaxDim> S;
  for (int a = 0; a < k; ++a) {
    S[a] = jet.second[a];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) S[a](i, j) -= GM(m, i, j) * J(a, m);
        if (!flat_target) S[a](i, j) += J.col(i).dot(GN.upper[a] * J.col(j));
      }
  }
  return S;
}

Vec tension_field(const SmoothMapSpec& u, const DriftField& V, const Point& x) {
  return tension_from_jet(u, V, u.jet(x), x);
}

BochnerTerms bochner_terms(const SmoothMapSpec& u, const DriftField& V, const Point& x, const BochnerOptions& opts) {
  const ManifoldModel& M = u.domain();
  const ManifoldModel& N = u.target();
  const int n = M.dim();
  const int k = N.dim();
  const MapJet jet = u.jet(x);
  const Mat gi = M.inverse_metric_at(x);
  const Mat H = N.metric_at(jet.value);
  const Mat& J = jet.jacobian;
  BochnerTerms t;

  const Derivs e = central_derivs([&](const Point& y) { return energy_density2(u, u.jet(y), y); }, x, opts.h,
                                  opts.richardson);
  t.lhs = 0.5 * weighted_laplacian(M, V, x, e);

  const auto S = map_hessian(u, jet, x);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) t.hessian += H(a, b) * (gi * S[a] * gi * S[b].transpose()).trace();

  const Vec W = tension_from_jet(u, V, jet, x);
  const Mat dW = central_jacobian([&](const Point& y) { return tension_from_jet(u, V, u.jet(y), y); }, x, opts.h,
                                  opts.richardson);
  Mat nablaW = dW;  // column j: nabla_j tau_V(u)
  if (N.kind() != ManifoldKind::euclidean) {
    const Christoffel GN = N.christoffel(jet.value);
    for (int a = 0; a < k; ++a)
      for (int j = 0; j < n; ++j) nablaW(a, j) += J.col(j).dot(GN.upper[a] * W);
  }
  t.tension = (gi * J.transpose() * H * nablaW).trace();

  const Mat R = weighted_ricci_tensor(M, V, EffectiveDimension::plus_infinity(), x);
  t.ricci = (gi * R * gi * J.transpose() * H * J).trace();

  if (N.kind() != ManifoldKind::euclidean) {
    const Mat E = orthonormal_frame(M, x);
    const Mat gram = E.transpose() * J.transpose() * H * J * E;
    t.curvature = N.curvature_term(gram);
  }
  t.residual = t.lhs - (t.hessian + t.tension + t.ricci - t.curvature);
  return t;
}

double bochner_residual(const SmoothMapSpec& u, const DriftField& V, const Point& x, const BochnerOptions& opts) {
  return bochner_terms(u, V, x, opts).residual;
}

ScalarBochnerTerms scalar_bochner(const ManifoldModel& M, const DriftField& V, const ScalarField& u,
                                  const EffectiveDimension& m, const Point& x, const BochnerOptions& opts) {
  M.require_in_chart(x);
  const Mat gi = M.inverse_metric_at(x);
  const Vec du = u.gradient(x);
  const Vec grad = gi * du;
  ScalarBochnerTerms t;
  const Derivs q = central_derivs(
      [&](const Point& y) {
        const Vec d = u.gradient(y);
        return d.dot(M.inverse_metric_at(y) * d);
      },
      x, opts.h, opts.richardson);
  t.lhs = 0.5 * weighted_laplacian(M, V, x, q);
  const Mat Hs = hessian_scalar(M, u, x);
  t.hessian = (gi * Hs * gi * Hs).trace();
  t.laplacian_V = laplacian_V(M, V, u, x);
  const Derivs l = central_derivs([&](const Point& y) { return laplacian_V(M, V, u, y); }, x, opts.h, opts.richardson);
  t.gradient_of_laplacian = l.grad.dot(grad);
  t.ricci_infinity = grad.dot(weighted_ricci_tensor(M, V, EffectiveDimension::plus_infinity(), x) * grad);
  t.ricci_m = grad.dot(weighted_ricci_tensor(M, V, m, x) * grad);
  t.drift_derivative = V.identically_zero() ? 0.0 : V.at(x).dot(du);
  t.residual = t.lhs - (t.hessian + t.gradient_of_laplacian + t.ricci_infinity);
  return t;
}

namespace {

void require_bochner_range(const EffectiveDimension& m, int n) {
  if (!m.is_infinite() && m.value() > 0 && m.value() < n)
    throw InvalidConfigurationError("Bochner inequalities need m in [-inf, 0] or [n, +inf]");
}

}  // namespace

double scalar_bochner_rhs(const ScalarBochnerTerms& t, int n, const EffectiveDimension& m) {
  require_bochner_range(m, n);
  return t.laplacian_V * t.laplacian_V / n + 2.0 * t.laplacian_V * t.drift_derivative / n + t.gradient_of_laplacian +
         t.ricci_m;
}

double scalar_bochner_rhs_negative_m(const ScalarBochnerTerms& t, int n, const EffectiveDimension& m) {
  require_bochner_range(m, n);
  if (!m.is_infinite() && (m.value() == 0.0 || m.value() == n))
    throw InvalidConfigurationError("this inequality needs m < 0 or m > n");
  const double inv_m = m.is_infinite() ? 0.0 : 1.0 / m.value();
  return t.ricci_m + t.laplacian_V * t.laplacian_V * inv_m + t.gradient_of_laplacian;
}

HilbertTraceResult hilbert_trace_check(const HilbertArray& h, std::optional<int> null_multiplicity) {
  const int n = static_cast<int>(h.size());
  if (n == 0) throw InputError("empty array");
  const Eigen::Index d = h[0].empty() ? 0 : h[0][0].size();
  double scale = 0.0;
  for (const auto& row : h) {
    if (static_cast<int>(row.size()) != n) throw InputError("array must be square");
    for (const auto& v : row) {
      if (v.size() != d) throw InputError("entries must share one dimension");
      scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((h[i][j] - h[j][i]).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, scale))
        throw InputError("h_ij must equal h_ji");
  int k = 0;
  if (null_multiplicity) {
    k = *null_multiplicity;
    if (k < 1 || k >= n) throw InputError("null multiplicity must lie in 1..n-1");
    // A(i*d + l, j) = <h_ij, e_l>; its kernel is the kernel of (h_ij).
    Eigen::MatrixXd A(n * d, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A.block(i * d, j, d, 1) = h[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    int null = n - static_cast<int>(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) <= 1e-10 * std::max(1.0, sv(0))) ++null;
    if (null < k) throw PreconditionError("array has a smaller null space than the stated multiplicity");
  }
  HilbertTraceResult r;
  Eigen::VectorXd trace = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    trace += h[i][i];
    for (int j = 0; j < n; ++j) r.lhs += h[i][j].squaredNorm();
  }
  r.rhs = trace.squaredNorm() / (n - k);
  r.pass = r.lhs >= r.rhs - 1e-12 * std::max(1.0, r.lhs);
  return r;
}

bool BochnerReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const BochnerRow& r) { return r.pass; });
}

double BochnerReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.margin);
  return m;
}

void write_bochner_csv(std::ostream& out, const std::vector<BochnerRow>& rows, bool header) {
  if (header) out << "check_id,point,lhs,rhs,margin,pass\n";
  for (const auto& r : rows) {
    std::string pt;
    for (Eigen::Index i = 0; i < r.point.size(); ++i) pt += fmt::format("{}{:.12g}", i ? ";" : "", r.point(i));
    fmt::print(out, "{},{},{:.12g},{:.12g},{:.12g},{}\n", r.check_id, pt, r.lhs, r.rhs, r.margin,
               r.pass ? "true" : "false");
  }
}

double bochner_coefficient(const EffectiveDimension& m, int n) {
  require_bochner_range(m, n);
  if (m.is_infinite()) return 2.0 / n;
  if (m.value() == n) throw InvalidConfigurationError("coefficient undefined at m = n");
  return 2.0 * m.value() / (n * (m.value() - n));
}

namespace {

void require_harmonic(const SmoothMapSpec& u, const DriftField& V, const std::vector<Point>& points,
                      const HarmonicPreconditions& pre) {
  for (const auto& x : points) {
    const MapJet jet = u.jet(x);
    const Vec tau = tension_from_jet(u, V, jet, x);
    const double norm = std::sqrt(tau.dot(u.target().metric_at(jet.value) * tau));
    if (norm > pre.tension_tolerance)
      throw PreconditionError(fmt::format("map is not V-harmonic: |tau_V| = {:.3g} at a sample point", norm));
  }
}

}  // namespace

BochnerReport bochner_lower_bound_check(const SmoothMapSpec& u, const DriftField& V, const EffectiveDimension& m,
                                        const std::vector<Point>& points, const HarmonicPreconditions& pre,
                                        const BochnerOptions& opts) {
  const ManifoldModel& M = u.domain();
  const int n = M.dim();
  require_bochner_range(m, n);
  const auto sect = u.target().sectional_bound();
  if (!sect || *sect > 0.0) throw UnsupportedConfigurationError("target must have nonpositive sectional curvature");
  require_harmonic(u, V, points, pre);
  const double coef = V.identically_zero() ? 0.0 : bochner_coefficient(m, n);
  BochnerReport rep;
  for (const auto& x : points) {
    const Mat E = orthonormal_frame(M, x);
    const Mat R = E.transpose() * weighted_ricci_tensor(M, V, m, x) * E;
    const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(R, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (min_eig < -pre.ricci_tolerance) throw PreconditionError("Ric_V^m is negative at a sample point");
    const MapJet jet = u.jet(x);
    const Derivs e = central_derivs([&](const Point& y) { return energy_density2(u, u.jet(y), y); }, x, opts.h,
                                    opts.richardson);
    BochnerRow row;
    row.check_id = "bochner_lower_bound";
    row.point = x;
    row.lhs = weighted_laplacian(M, V, x, e);
    if (coef != 0.0) {
      const Vec duV = jet.jacobian * V.at(x);
      row.rhs = coef * duV.dot(u.target().metric_at(jet.value) * duV);
    }
    row.margin = row.lhs - row.rhs;
    row.pass = row.margin >= -1e-4;
    rep.rows.push_back(row);
  }
  return rep;
}

BochnerReport distance_laplacian_check(const SmoothMapSpec& u, const DriftField& V, const Point& o,
                                       const std::vector<Point>& points, const HarmonicPreconditions& pre,
                                       const BochnerOptions& opts) {
  const ManifoldModel& N = u.target();
  if (!N.constant_curvature()) throw UnsupportedConfigurationError("distance check needs a model target");
  if (N.kappa() > 0.0)
    throw UnsupportedConfigurationError("target with positive curvature: use the convex gauge check instead");
  N.require_in_chart(o);
  require_harmonic(u, V, points, pre);
  BochnerReport rep;
  for (const auto& x : points) {
    const Derivs d = central_derivs(
        [&](const Point& y) {
          const double r = N.distance(u(y), o);
          return r * r;
        },
        x, opts.h, opts.richardson);
    BochnerRow row;
    row.check_id = "distance_laplacian";
    row.point = x;
    row.lhs = weighted_laplacian(u.domain(), V, x, d);
    row.rhs = 2.0 * energy_density2(u, u.jet(x), x);
    row.margin = row.lhs - row.rhs;
    row.pass = row.margin >= -1e-4;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace vharm
