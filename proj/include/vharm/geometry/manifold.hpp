#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "vharm/types.hpp"

namespace vharm {

enum class ManifoldKind { euclidean, hyperbolic, sphere, rotationally_symmetric };

std::string to_string(ManifoldKind kind);

/// Warping function phi of a rotationally symmetric metric dr^2 + phi(r)^2 dtheta^2,
/// with phi(0) = 0, phi'(0) = 1 and phi odd.
struct WarpProfile {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> ddphi;
  double cut_radius = std::numeric_limits<double>::infinity();

  static WarpProfile flat();
  /// sinh(sqrt(-kappa) r)/sqrt(-kappa), kappa < 0.
  static WarpProfile hyperbolic(double kappa);
  /// sin(sqrt(kappa) r)/sqrt(kappa), kappa > 0.
  static WarpProfile spherical(double kappa);
  /// r + c r^3: curvature changes sign with c; used for non-constant tests.
  static WarpProfile cubic(double c);
};

/// Gamma^k_{ij} stored as upper[k](i, j).
struct Christoffel {
  int dim = 0;
  std::array<Mat, kMaxDim> upper;

  double operator()(int k, int i, int j) const { return upper[static_cast<std::size_t>(k)](i, j); }
};

/// A model Riemannian manifold in a single global chart: Cartesian for
/// euclidean and rotationally symmetric kinds, stereographic for the sphere,
/// Poincare ball for hyperbolic space. The constant-curvature charts share the
/// conformal factor lambda(x) = 2 / (1 + kappa |x|^2).
class ManifoldModel {
 public:
  static ManifoldModel euclidean(int n);
  static ManifoldModel hyperbolic(int n, double kappa = -1.0);
  static ManifoldModel sphere(int n, double kappa = 1.0);
  static ManifoldModel rotationally_symmetric(int n, WarpProfile warp);

  int dim() const noexcept { return dim_; }
  ManifoldKind kind() const noexcept { return kind_; }
  /// Sectional curvature of the constant-curvature kinds (0 for euclidean).
  double kappa() const noexcept { return kappa_; }
  bool constant_curvature() const noexcept { return kind_ != ManifoldKind::rotationally_symmetric; }
  double cut_locus_radius() const noexcept;
  /// Upper bound on sectional curvature when used as a target.
  std::optional<double> sectional_bound() const noexcept;
  const WarpProfile* warp() const noexcept { return warp_ ? &*warp_ : nullptr; }

  bool in_chart(const Point& x) const;
  /// Throws DomainError when x is outside the chart.
  void require_in_chart(const Point& x) const;

  Mat metric_at(const Point& x) const;
  Mat inverse_metric_at(const Point& x) const;
  /// Conformal factor lambda with g = lambda^2 I (constant-curvature kinds).
  double conformal_factor(const Point& x) const;
  double norm(const Point& x, const Vec& v) const;
  double inner(const Point& x, const Vec& a, const Vec& b) const;

  Christoffel christoffel(const Point& x) const;
  Mat ricci(const Point& x) const;

  double distance(const Point& p, const Point& x) const;
  /// Geodesic radius of the chart point x measured from the chart origin.
  double distance_from_origin(const Point& x) const;
  /// Chart radius of the point at geodesic distance r from the origin.
  double chart_radius_at(double r) const;

  /// Exponential and logarithm maps in chart coordinates. Supported for the
  /// constant-curvature kinds everywhere and for rotationally symmetric kinds
  /// from the chart origin only.
  Point exp(const Point& x, const Vec& v) const;
  Vec log(const Point& x, const Point& y) const;

  /// Unit-speed geodesic from p with initial direction u (unit g-norm).
  Point geodesic_point(const Point& p, const Vec& u, double t) const;
  Vec geodesic_velocity(const Point& p, const Vec& u, double t) const;

  /// Generator correction b^k = -g^{ij} Gamma^k_{ij}.
  Vec laplacian_drift(const Point& x) const;
  /// Matrix sigma with sigma sigma^T = g^{-1}.
  Mat noise_factor(const Point& x) const;

  /// Sum over frames of <R(du e_i, du e_j) du e_j, du e_i> for a Gram matrix of
  /// image vectors (constant-curvature kinds only).
  double curvature_term(const Mat& gram) const;

  /// Isometric embedding into R^{n+1} (Euclidean for the sphere, Minkowski for
  /// hyperbolic space) and its inverse. Constant nonzero curvature only.
  Vec embed(const Point& x) const;
  Point unembed(const Vec& y) const;

 private:
  ManifoldModel(int n, ManifoldKind kind, double kappa);

  bool conformal() const noexcept { return kind_ == ManifoldKind::hyperbolic || kind_ == ManifoldKind::sphere; }
  double ambient_inner(const Vec& a, const Vec& b) const;
  Mat embedding_jacobian(const Point& x) const;
  Vec ambient_to_chart(const Point& x, const Vec& w) const;
  Christoffel rotsym_christoffel_raw(const Point& x) const;

  int dim_;
  ManifoldKind kind_;
  double kappa_;
  std::optional<WarpProfile> warp_;
};

}  // namespace vharm
