#pragma once

#include <cstdint>

#include "vharm/geometry/drift.hpp"
#include "vharm/geometry/effective_dimension.hpp"
#include "vharm/geometry/manifold.hpp"
#include "vharm/geometry/scalar_field.hpp"

namespace vharm {

Christoffel christoffel(const ManifoldModel& manifold, const Point& x);
Mat ricci(const ManifoldModel& manifold, const Point& x);

/// Covariant Hessian d_i d_j f - Gamma^k_ij d_k f.
Mat hessian_scalar(const ManifoldModel& manifold, const ScalarField& f, const Point& x);
double laplacian(const ManifoldModel& manifold, const ScalarField& f, const Point& x);
/// Delta_V f = Delta f - <V, grad f>.
double laplacian_V(const ManifoldModel& manifold, const DriftField& V, const ScalarField& f, const Point& x);
/// Metric gradient g^{-1} df.
Vec metric_gradient(const ManifoldModel& manifold, const ScalarField& f, const Point& x);

/// Covariant derivative N(k, i) = (nabla_i V)^k.
Mat covariant_derivative(const ManifoldModel& manifold, const DriftField& V, const Point& x);

/// Bilinear form Ric + (1/2) L_V g - V* (x) V* / (m - n) in chart components.
Mat weighted_ricci_tensor(const ManifoldModel& manifold, const DriftField& V, const EffectiveDimension& m,
                          const Point& x);
double weighted_ricci(const ManifoldModel& manifold, const DriftField& V, const EffectiveDimension& m,
                      const Point& x, const Vec& v);

/// r_p(x) = d(p, x) as a scalar field; analytic for euclidean kinds and for
/// the other kinds with p at the chart origin, finite differences otherwise.
ScalarField distance_function(const ManifoldModel& manifold, const Point& p);
ScalarField squared_distance_function(const ManifoldModel& manifold, const Point& p);

/// Delta_V r_p at x from the closed-form Laplacian of the distance on model
/// kinds: (n-1) cot_kappa(r) (or (n-1) phi'/phi) minus <V, grad r_p>.
double radial_laplacian(const ManifoldModel& manifold, const DriftField& V, const Point& p, const Point& x);
/// Same quantity through the generic operator pipeline (covariant Hessian of
/// the distance function, trace, drift term).
double radial_laplacian_measured(const ManifoldModel& manifold, const DriftField& V, const Point& p,
                                 const Point& x);
/// Unit radial direction grad r_p at x in chart components.
Vec radial_direction(const ManifoldModel& manifold, const Point& p, const Point& x);

struct CurvatureSample {
  double min_value = 0.0;
  Point argmin_x;
  Vec argmin_v;
  std::size_t samples = 0;
  std::size_t negatives = 0;  // samples below -tolerance
};

/// Samples Ric_V^m(v, v) at random points of the geodesic ball B_radius(origin)
/// and random unit directions.
CurvatureSample sample_weighted_ricci(const ManifoldModel& manifold, const DriftField& V,
                                      const EffectiveDimension& m, double radius, std::size_t samples,
                                      std::uint64_t seed, double tolerance = 1e-10);

/// Uniform point in the geodesic ball about the chart origin and a unit
/// direction there, drawn from the given stream (used by samplers and tests).
class RandomStream;
Point random_point_in_ball(const ManifoldModel& manifold, double radius, RandomStream& rng);
Vec random_unit_vector(const ManifoldModel& manifold, const Point& x, RandomStream& rng);

}  // namespace vharm
