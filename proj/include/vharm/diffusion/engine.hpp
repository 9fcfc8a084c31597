#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vharm/geometry/drift.hpp"
#include "vharm/geometry/manifold.hpp"
#include "vharm/random.hpp"
#include "vharm/stats.hpp"
#include "vharm/types.hpp"

namespace vharm {

struct ExitEvent {
  std::size_t index = 0;    // first grid index outside the domain
  std::string boundary;     // "domain" (geodesic ball) or "chart"
};

/// A simulated path of the Delta_V-diffusion on a uniform time grid. After an
/// exit the path is stopped: the remaining points repeat the exit point.
struct DiffusionPath {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> radial;
  std::vector<Vec> brownian_increments;
  std::optional<ExitEvent> exited;
  /// Per-step accumulator for the local-time term of the radial decomposition.
  /// Stays zero: simulations never reach a cut locus.
  std::vector<double> local_time_residual;
};

/// Experiment domain: the geodesic ball of radius exit_radius about base.
struct SimulationOptions {
  std::optional<Point> base;
  double exit_radius = std::numeric_limits<double>::infinity();
};

/// Monte-Carlo ensemble parameters. Path i uses the stream (seed, i).
struct EnsembleSpec {
  std::size_t n_paths = 0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: default_thread_count()
};

/// One Euler-Maruyama step of dX = sqrt(2) sigma(X) dW + (b(X) - V(X)) dt with
/// sigma sigma^T = g^{-1} and b the Laplacian drift, so the generator is Delta_V.
Point step(const ManifoldModel& manifold, const DriftField& V, const Point& x, const Vec& dW, double dt);

/// dW ~ N(0, dt I_n).
Vec brownian_increment(RandomStream& rng, int n, double dt);

DiffusionPath simulate(const ManifoldModel& manifold, const DriftField& V, const Point& x0, double t_end, double dt,
                       const RngSpec& rng, const SimulationOptions& options = {});

/// Point at geodesic distance r from p along the first chart axis.
Point point_at_distance(const ManifoldModel& manifold, const Point& p, double r);

/// Runs sample(i, stream_i) for every path and returns the per-path vectors in
/// path order, so any reduction is independent of the thread count.
std::vector<std::vector<double>> run_ensemble(
    const EnsembleSpec& ens, const std::function<std::vector<double>(std::size_t, RandomStream&)>& sample);

/// Per-column estimates of an ensemble result.
std::vector<McEstimate> column_estimates(const std::vector<std::vector<double>>& samples);

/// E[f(X_{t ^ tau})] at each t of an increasing grid, with paths stopped on
/// leaving the domain described by options.
std::vector<McEstimate> expectation_at_times(const ManifoldModel& manifold, const DriftField& V, const Point& x0,
                                             const std::vector<double>& t_grid, const EnsembleSpec& ens,
                                             const std::function<double(const Point&)>& f,
                                             const SimulationOptions& options = {});

/// Several functionals at once: result[j][i] is E[f_i(X_{t_j ^ tau})].
std::vector<std::vector<McEstimate>> expectations_at_times(
    const ManifoldModel& manifold, const DriftField& V, const Point& x0, const std::vector<double>& t_grid,
    const EnsembleSpec& ens, const std::vector<std::function<double(const Point&)>>& fs,
    const SimulationOptions& options = {});

}  // namespace vharm
