#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vharm/diffusion/checks.hpp"
#include "vharm/diffusion/recurrence.hpp"
#include "vharm/harmonic/growth.hpp"
#include "vharm/harmonic/solver.hpp"
#include "vharm/numerics.hpp"

namespace vharm {

struct SubmartingaleParams {
  Point x0;
  std::vector<double> t_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  EnsembleSpec ens;
  /// Paths stop on leaving this ball about the grid center (default radius - h).
  std::optional<double> stop_radius;
  double pointwise_tol = 1e-4;
};

struct SubmartingaleReport {
  std::size_t interior_nodes = 0;
  std::size_t violations = 0;  // nodes with Delta_V phi(u) < -tol
  double min_laplacian = 0.0;
  Status pointwise = Status::inconclusive;
  /// E[phi(u(X_t))] per t and the mean increments between consecutive times.
  std::vector<McRow> rows;
  Status monotone = Status::inconclusive;

  Status overall() const;
};

/// (i) discrete Delta_V phi(u) >= -tol at interior nodes; (ii) t -> E[phi(u(X_{t ^ tau}))]
/// nondecreasing, each increment >= -3 stderr (per-path differences).
SubmartingaleReport submartingale_phi_check(const MapGrid& u, const DriftField& V, const ConvexGauge& gauge,
                                            const SubmartingaleParams& params);

/// Rows "growth_lower_bound": 2t|du|^2(x0) <= E[d_N^2(u(X_{t ^ tau}), o)], and
/// "energy_submartingale": |du|^2(x0) <= E[|du|^2(X_{t ^ tau})], with paths
/// stopped on leaving B_stop(center). Rows become low_power when more than
/// half of the paths have stopped by t.
McReport liouville_lower_bound_check(const MapView& u, const DriftField& V, const Point& o, const Point& x0,
                                     const std::vector<double>& t_grid, const EnsembleSpec& ens,
                                     std::optional<double> stop_radius = std::nullopt);

/// Boundary data on every sphere: pattern((x - center) / |x - center|).
struct DecaySpec {
  ManifoldModel domain = ManifoldModel::euclidean(2);
  ManifoldModel target = ManifoldModel::euclidean(1);
  DriftField V = DriftField::zero(2);
  std::function<Point(const Vec&)> pattern;
  std::vector<double> radii;
  int nodes_per_radius = 32;
  SolverOptions solver;
  unsigned threads = 0;
};

struct DecayRow {
  double a = 0.0;
  double h = 0.0;
  double energy_center = 0.0;  // |du|^2 at the center node
  double residual = 0.0;
  int sweeps = 0;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  LineFit energy_fit;    // log |du|^2(center) against log a
  LineFit gradient_fit;  // log |du|(center) against log a
  bool nonincreasing = false;
  /// pass: nonincreasing and energy slope <= -1 within 3 fit stderr.
  Status status = Status::inconclusive;
};

DecayReport liouville_decay_demo(const DecaySpec& spec);

enum class OscillationFamily {
  /// Radial V-harmonic profiles on annuli 1 < r < a with data 1 inside and 0
  /// outside, from the scale function of the radial generator.
  annulus_profile,
  /// Solved maps on balls B_a with fixed boundary pattern.
  ball_solver,
};

struct BridgeSpec {
  ManifoldModel manifold = ManifoldModel::euclidean(2);
  DriftField V = DriftField::zero(2);
  // Recurrence scan.
  double a = 1.0;
  double r_start = 2.0;
  std::vector<double> b_values;
  EnsembleSpec ens;
  HittingOptions hitting;
  // Oscillation family.
  OscillationFamily family = OscillationFamily::annulus_profile;
  std::vector<double> radii;
  double inner_radius = 2.0;
  ManifoldModel target = ManifoldModel::euclidean(1);
  std::function<Point(const Vec&)> pattern;
  std::optional<ConvexGauge> gauge;
  int nodes_per_radius = 16;
};

struct BridgeReport {
  RecurrenceScan scan;
  std::vector<double> radii;
  /// Oscillation over B_inner (of phi(u) when a gauge is given).
  std::vector<double> oscillations;
  /// Increment ratios of 1 / oscillation across the radius sequence.
  std::vector<double> increment_ratios;
  bool decays = false;
  /// pass when the recurrence class and the oscillation trend agree, fail when
  /// they disagree, inconclusive when the scan is.
  Status status = Status::inconclusive;
  std::string summary;
};

BridgeReport recurrence_liouville_bridge(const BridgeSpec& spec);

/// Oscillation of the annulus family over 1 <= r <= inner for each outer radius.
std::vector<double> annulus_oscillations(const ManifoldModel& manifold, const DriftField& V, double inner,
                                         const std::vector<double>& radii);

}  // namespace vharm
