#pragma once

#include <optional>
#include <vector>

#include "vharm/geometry/drift.hpp"
#include "vharm/geometry/effective_dimension.hpp"
#include "vharm/geometry/manifold.hpp"

namespace vharm {

/// Base point with a set of unit initial directions for radial geodesics.
struct RadialFrame {
  Point base;
  std::vector<Vec> directions;
  double max_radius = 0.0;

  /// Normalizes directions to unit g-norm; max_radius must stay below the cut radius.
  static RadialFrame make(const ManifoldModel& manifold, Point base, std::vector<Vec> directions, double max_radius);
  /// Evenly spaced directions in 2-D, deterministic pseudo-random ones plus
  /// coordinate axes in higher dimension.
  static RadialFrame uniform(const ManifoldModel& manifold, Point base, int count, double max_radius);
};

struct ComparisonInput {
  ManifoldModel manifold;
  DriftField drift;
  EffectiveDimension m;
  double kappa = 0.0;
  double c_p = 1.0;
  Point base;

  /// C_p defaults to exp(-2 f(p)/(n-m)) for gradient drifts on the m <= 1
  /// path and to 1 otherwise.
  static ComparisonInput make(ManifoldModel manifold, DriftField drift, EffectiveDimension m, double kappa,
                              Point base, std::optional<double> c_p = std::nullopt);
  int dim() const { return manifold.dim(); }
};

double default_c_p(const ManifoldModel& manifold, const DriftField& drift, const EffectiveDimension& m,
                   const Point& base);

/// Samples of the drift along one radial geodesic on the uniform grid
/// t_k = k * step: radial component <V, gamma'>, V_gamma = its integral, and
/// |V|_g.
struct RayProfile {
  double step = 0.0;
  std::vector<double> radial_component;
  std::vector<double> v_gamma;
  std::vector<double> drift_norm;

  double at(const std::vector<double>& values, double t) const;
  double v_gamma_at(double t) const { return at(v_gamma, t); }
};

/// Grid step used for ray quadrature up to radius r (at least 1000 panels
/// per unit radius and at least 1000 panels in total).
double ray_step(double r);
RayProfile ray_profile(const ComparisonInput& input, const Vec& direction, double r_max, double step);

double f_V_along_ray(const ComparisonInput& input, const Vec& direction, double r);
double s_p(const ComparisonInput& input, const Vec& direction, double r);
double cot_kappa(double kappa, double r);

/// Generalized bound (n-m) cot_kappa(s_p) exp(-2 f_V/(n-m)) C_p for finite
/// m <= 1; the classical (m-1) cot_kappa(r) for m >= n.
double laplacian_comparison_bound(const ComparisonInput& input, const Vec& direction, double r);
double classical_comparison_bound(double m, double kappa, double r);

/// Measured Delta_V r_p at distance r along the given direction.
double measured_radial_laplacian(const ComparisonInput& input, const Vec& direction, double r);

}  // namespace vharm
