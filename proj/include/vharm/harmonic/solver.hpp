#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vharm/geometry/drift.hpp"
#include "vharm/harmonic/map_grid.hpp"

namespace vharm {

/// eta is the relaxation factor of the Gauss-Seidel step
/// u_i <- exp_{u_i}(eta * sum c_e log_{u_i} u_j / sum c_e). When unset, the
/// optimal SOR value for the flat Dirichlet problem on the ball is used.
struct SolverOptions {
  std::optional<double> eta;
  double tol = 1e-9;
  int max_sweeps = 200000;
  int max_halvings = 20;
  int residual_every = 10;
};

struct SolveResult {
  MapGrid grid;
  int sweeps = 0;
  double residual = 0.0;
  /// Discrete weighted energy after initialization and after every accepted
  /// sweep (gradient drifts only; empty otherwise).
  std::vector<double> energy_history;
  int halvings = 0;
  bool projected = false;
  std::vector<std::string> notes;

  bool energy_nonincreasing() const;
};

/// Discrete V-harmonic map on the chart ball B_radius(center) of a Euclidean
/// domain with lattice spacing h.
///
/// Edge weights are c_e = e^{-f(mid)} h^{n-1} / l_e for V = grad f, whose
/// energy E = 1/2 sum c_e d_N^2 is minimized; for other drifts the upwinded
/// weights e^{-<V(mid), x_j - x_i>/2} h^{n-1} / l_e are used and only the
/// residual is tracked. The tension at node i is
/// tau_i = (h^n rho_i)^{-1} sum c_e log_{u_i} u_j with rho_i = e^{-f(x_i)}.
SolveResult solve(const ManifoldModel& domain, const Point& center, double radius, double h, const BoundaryFn& g,
                  const ManifoldModel& target, const DriftField& V, const SolverOptions& opts = {});

/// Continues the iteration on a grid whose boundary is already set.
SolveResult solve(MapGrid grid, const DriftField& V, const SolverOptions& opts = {});

/// sup over interior nodes of |tau_i|_N.
double tension_residual(const MapGrid& u, const DriftField& V);
/// Discrete weighted energy (gradient drifts).
double discrete_energy(const MapGrid& u, const DriftField& V);

/// (h^n rho_i)^{-1} sum c_e (s_j - s_i) at interior nodes (0 elsewhere) for
/// per-node scalars s; cut edges use boundary(edge).
std::vector<double> discrete_laplacian(const MapGrid& u, const DriftField& V, const std::vector<double>& node_values,
                                       const std::function<double(const MapGrid::Edge&)>& boundary);

/// |du|^2 at each node: central differences of log_{u_i} along lattice axes
/// (second-order on cut edges too). Non-interior nodes copy the value of the
/// nearest interior node so that interpolation is defined near the sphere.
std::vector<double> energy_density(const MapGrid& u);

}  // namespace vharm
