#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "vharm/bochner/map_spec.hpp"
#include "vharm/comparison/audit.hpp"
#include "vharm/harmonic/map_grid.hpp"
#include "vharm/stats.hpp"

namespace vharm {

/// Uniform read access to a map on a ball of a Euclidean chart domain, backed
/// either by a solved grid (interpolated) or by a smooth analytic map.
struct MapView {
  ManifoldModel target = ManifoldModel::euclidean(1);
  Point center;
  double radius = std::numeric_limits<double>::infinity();
  std::function<Point(const Point&)> value;
  /// |du|^2 at a domain point.
  std::function<double(const Point&)> energy_density;
  /// Domain points within distance a of the center used for sup estimates.
  std::function<std::vector<Point>(double)> samples;
  /// sup over B_a(center) of d_N(u, o).
  std::function<double(const Point& o, double a)> sup_distance;

  static MapView from_grid(std::shared_ptr<const MapGrid> grid);
  /// Samples on the lattice center + (a/resolution) Z^n.
  static MapView from_map(const SmoothMapSpec& u, const Point& center, int resolution = 16);
};

enum class GrowthClass { bounded, g3_sqrt_log, g2_sqrt, g1_sublinear, superlinear };
std::string to_string(GrowthClass c);

/// m_u(a) over a radius sequence and the class it supports. Classes are
/// nested: bounded implies (G3), which implies (G2), which implies (G1).
struct GrowthProfile {
  std::vector<double> radii;
  std::vector<double> m_values;
  GrowthClass growth_class = GrowthClass::bounded;
  /// Least-squares log-log slope of m_u over the upper half of the radii.
  double exponent = 0.0;
  /// m_u(a) / a, m_u(a) / sqrt(a), m_u(a) / sqrt(log(1 + a)).
  std::vector<double> ratio_linear;
  std::vector<double> ratio_sqrt;
  std::vector<double> ratio_sqrt_log;

  /// Growth condition G1, G2 or G3 given as 1, 2, 3.
  bool satisfies(int g) const;
};

/// Rules, applied in order: bounded when the last doubling changes m_u by less
/// than 1%; superlinear when the exponent is >= 0.9; (G1) only when >= 0.55;
/// otherwise (G3) when m_u / sqrt(log(1 + a)) is nonincreasing over the last
/// three radii, else (G2).
GrowthProfile classify_growth(const std::vector<double>& radii, const std::vector<double>& m_values);
GrowthProfile classify_growth(const MapView& u, const Point& o, const std::vector<double>& radii);

struct GradientEstimateRow {
  double a = 0.0;
  double sup_energy = 0.0;  // sup_{B_a} |du|^2
  double m_u_2a = 0.0;
  double rho = 0.0;         // sup_energy / (m_u(2a) + 1)^2
};

struct GradientEstimateReport {
  std::vector<GradientEstimateRow> rows;
  double fitted_constant = 0.0;  // max rho
  Status status = Status::inconclusive;
};

/// rho(a) for a solved grid covering B_{2a}; unsolved grids are refused.
GradientEstimateRow gradient_estimate(const MapGrid& u, const Point& o, double a);
GradientEstimateRow gradient_estimate(const MapView& u, const Point& o, double a);
/// Boundedness across a doubling sequence: pass when every rho(a_k) stays
/// within 20% above the largest earlier value.
GradientEstimateReport gradient_estimate_check(std::vector<GradientEstimateRow> rows);

/// phi(y) = 1 - cos(sqrt(kappa) d_N(y, o)) on the sphere model of curvature
/// kappa, convex on regular balls about o.
class ConvexGauge {
 public:
  ConvexGauge(double kappa, Point o);

  double kappa() const noexcept { return kappa_; }
  const Point& o() const noexcept { return o_; }
  double operator()(const Point& y) const;
  /// pi / (2 sqrt(kappa)).
  double regular_radius() const;

  struct ConvexityFit {
    double fitted_constant = 0.0;  // min phi'' / phi'^2 over samples
    double min_second_difference = 0.0;
    std::size_t samples = 0;
    std::size_t violations = 0;    // phi'' < C phi'^2 - tol at the fitted C
    Status status = Status::inconclusive;
  };
  /// Second and first differences along random unit-speed geodesic segments
  /// inside B_radius(o).
  ConvexityFit fit_convexity(double radius, std::size_t samples, std::uint64_t seed, double tol = 1e-8) const;

 private:
  double kappa_;
  Point o_;
  ManifoldModel model_;
};

}  // namespace vharm
