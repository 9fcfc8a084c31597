#include "vharm/harmonic/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "vharm/errors.hpp"
#include "vharm/numerics.hpp"
#include "vharm/parallel.hpp"

namespace vharm {

namespace {

std::size_t grid_index(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

void check_t_grid(const std::vector<double>& t_grid, double dt) {
  if (t_grid.empty()) throw InputError("t_grid must not be empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1])) throw InputError("t_grid must be increasing and nonnegative");
    if (std::abs(t_grid[i] / dt - std::round(t_grid[i] / dt)) > 1e-6) {
      throw InputError(fmt::format("t = {} is not a multiple of dt = {}", t_grid[i], dt));
    }
  }
}

Status worst(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::fail: return 4;
      case Status::low_power: return 3;
      case Status::inconclusive: return 2;
      case Status::boundary: return 1;
      case Status::pass: return 0;
    }
    return 4;
  };
  return rank(a) >= rank(b) ? a : b;
}

// Observations f_j(X_{t ^ tau}) for every t in the grid, one row per path, and
// the per-time count of stopped paths.
struct Observed {
  std::vector<std::vector<double>> samples;  // [path][t * nf + j]
  std::vector<std::size_t> stopped;          // per t
};

Observed observe(const ManifoldModel& domain, const DriftField& V, const Point& x0, const std::vector<double>& t_grid,
                 const EnsembleSpec& ens, const std::vector<std::function<double(const Point&)>>& fs,
                 const SimulationOptions& options) {
  check_t_grid(t_grid, ens.dt);
  const std::size_t nt = t_grid.size(), nf = fs.size();
  auto rows = run_ensemble(ens, [&](std::size_t i, RandomStream&) {
    const DiffusionPath path = simulate(domain, V, x0, t_grid.back(), ens.dt, RngSpec{ens.seed, i}, options);
    std::vector<double> out(nt * (nf + 1));
    for (std::size_t k = 0; k < nt; ++k) {
      const std::size_t idx = std::min(grid_index(t_grid[k], ens.dt), path.points.size() - 1);
      for (std::size_t j = 0; j < nf; ++j) out[k * (nf + 1) + j] = fs[j](path.points[idx]);
      out[k * (nf + 1) + nf] = (path.exited && path.exited->index <= idx) ? 1.0 : 0.0;
    }
    return out;
  });
  Observed obs;
  obs.stopped.assign(nt, 0);
  for (auto& row : rows) {
    std::vector<double> values;
    values.reserve(nt * nf);
    for (std::size_t k = 0; k < nt; ++k) {
      for (std::size_t j = 0; j < nf; ++j) values.push_back(row[k * (nf + 1) + j]);
      obs.stopped[k] += row[k * (nf + 1) + nf] > 0.5 ? 1 : 0;
    }
    row = std::move(values);
  }
  obs.samples = std::move(rows);
  return obs;
}

McEstimate column(const Observed& obs, std::size_t col) {
  std::vector<double> v(obs.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = obs.samples[i][col];
  return estimate(v);
}

void require_geometric(const std::vector<double>& radii, const char* what) {
  if (radii.size() < 3) throw InputError(fmt::format("{}: at least 3 radii are required", what));
  const double q = radii[1] / radii[0];
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i - 1] > 0.0) || std::abs(radii[i] / radii[i - 1] - q) > 1e-9 * q) {
      throw InputError(fmt::format("{}: radii must form a geometric sequence", what));
    }
  }
  if (q < 1.5) throw InputError(fmt::format("{}: radius ratio must be at least 1.5", what));
}

// Mean-curvature factor phi'(r)/phi(r) of geodesic spheres about the origin.
double sphere_log_derivative(const ManifoldModel& M, double r) {
  switch (M.kind()) {
    case ManifoldKind::euclidean: return 1.0 / r;
    case ManifoldKind::hyperbolic: {
      const double s = std::sqrt(-M.kappa());
      return s / std::tanh(s * r);
    }
    case ManifoldKind::sphere: {
      const double s = std::sqrt(M.kappa());
      return s / std::tan(s * r);
    }
    case ManifoldKind::rotationally_symmetric: return M.warp()->dphi(r) / M.warp()->phi(r);
  }
  return 0.0;
}

}  // namespace

Status SubmartingaleReport::overall() const { return worst(pointwise, monotone); }

SubmartingaleReport submartingale_phi_check(const MapGrid& u, const DriftField& V, const ConvexGauge& gauge,
                                            const SubmartingaleParams& params) {
  const ManifoldModel& target = u.target();
  if (target.kind() != ManifoldKind::sphere || std::abs(target.kappa() - gauge.kappa()) > 1e-12 * gauge.kappa() ||
      target.dim() != gauge.o().size()) {
    throw InputError("submartingale_phi_check: gauge curvature or dimension does not match the target");
  }
  if (!u.solved()) throw PreconditionError("submartingale_phi_check: grid is not solved to tolerance");
  SubmartingaleReport rep;

  std::vector<double> phi(u.node_count());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = gauge(u.value(i));
  const auto lap = discrete_laplacian(u, V, phi, [&](const MapGrid::Edge& e) { return gauge(e.boundary_value); });
  rep.interior_nodes = u.interior_nodes().size();
  rep.min_laplacian = std::numeric_limits<double>::infinity();
  for (std::size_t node : u.interior_nodes()) {
    rep.min_laplacian = std::min(rep.min_laplacian, lap[node]);
    if (lap[node] < -params.pointwise_tol) ++rep.violations;
  }
  rep.pointwise = rep.violations == 0 ? Status::pass : Status::fail;

  SimulationOptions options;
  options.base = u.center();
  options.exit_radius = params.stop_radius.value_or(u.radius() - u.spacing());
  const ManifoldModel domain = ManifoldModel::euclidean(u.domain_dim());
  const Observed obs = observe(domain, V, params.x0, params.t_grid, params.ens,
                               {[&](const Point& x) { return gauge(u.interpolate(x)); }}, options);
  rep.monotone = Status::pass;
  for (std::size_t k = 0; k < params.t_grid.size(); ++k) {
    rep.rows.push_back(McRow{params.t_grid[k], "E[phi(u)]", column(obs, k), 0.0, Status::pass});
    if (k == 0) continue;
    std::vector<double> inc(obs.samples.size());
    for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = obs.samples[i][k] - obs.samples[i][k - 1];
    const McEstimate e = estimate(inc);
    const Status s = one_sided_status(e.mean, e.stderr_);
    rep.rows.push_back(McRow{params.t_grid[k], "E[phi(u)] increment", e, 0.0, s});
    rep.monotone = worst(rep.monotone, s);
  }
  return rep;
}

McReport liouville_lower_bound_check(const MapView& u, const DriftField& V, const Point& o, const Point& x0,
                                     const std::vector<double>& t_grid, const EnsembleSpec& ens,
                                     std::optional<double> stop_radius) {
  if (u.target.kind() != ManifoldKind::euclidean && u.target.kind() != ManifoldKind::hyperbolic) {
    throw UnsupportedConfigurationError("liouville_lower_bound_check: target must be of Hadamard kind");
  }
  SimulationOptions options;
  options.base = u.center;
  options.exit_radius = stop_radius.value_or(u.radius);
  const ManifoldModel domain = ManifoldModel::euclidean(static_cast<int>(u.center.size()));
  const Observed obs = observe(
      domain, V, x0, t_grid, ens,
      {[&](const Point& x) { return std::pow(u.target.distance(o, u.value(x)), 2); },
       [&](const Point& x) { return u.energy_density(x); }},
      options);
  const double e0 = u.energy_density(x0);
  McReport rep;
  rep.experiment_id = "liouville_lower_bound";
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const double stopped = static_cast<double>(obs.stopped[k]) / static_cast<double>(ens.n_paths);
    const McEstimate d2 = column(obs, 2 * k);
    const McEstimate en = column(obs, 2 * k + 1);
    Status s1 = one_sided_status(d2.mean - 2.0 * t * e0, d2.stderr_);
    Status s2 = one_sided_status(en.mean - e0, en.stderr_);
    if (stopped > 0.5) {
      s1 = s1 == Status::fail ? s1 : Status::low_power;
      s2 = s2 == Status::fail ? s2 : Status::low_power;
    }
    rep.rows.push_back(McRow{t, "growth_lower_bound", d2, 2.0 * t * e0, s1});
    rep.rows.push_back(McRow{t, "energy_submartingale", en, e0, s2});
    if (obs.stopped[k] > 0) rep.notes.push_back(fmt::format("t={}: stopped fraction {:.4f}", t, stopped));
  }
  return rep;
}

DecayReport liouville_decay_demo(const DecaySpec& spec) {
  if (!spec.pattern) throw InputError("liouville_decay_demo: boundary pattern missing");
  if (spec.radii.size() < 2) throw InputError("liouville_decay_demo: at least 2 radii are required");
  if (spec.nodes_per_radius < 4) throw InputError("liouville_decay_demo: nodes_per_radius must be at least 4");
  const int n = spec.domain.dim();
  const Point center = Point::Zero(n);
  const BoundaryFn g = [&](const Point& x) {
    const Vec r = x - center;
    return spec.pattern(r / r.norm());
  };
  DecayReport rep;
  rep.rows.resize(spec.radii.size());
  // Independent grids; each solve is single-threaded and deterministic.
  parallel_for(spec.radii.size(), spec.threads, [&](std::size_t i) {
    const double a = spec.radii[i];
    const double h = a / spec.nodes_per_radius;
    const SolveResult res = solve(spec.domain, center, a, h, g, spec.target, spec.V, spec.solver);
    const auto density = energy_density(res.grid);
    rep.rows[i] = DecayRow{a, h, density[*res.grid.nearest_node(center)], res.residual, res.sweeps};
  });
  std::vector<double> la, le, lg;
  rep.nonincreasing = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (i > 0 && rep.rows[i].energy_center > rep.rows[i - 1].energy_center * (1.0 + 1e-9)) rep.nonincreasing = false;
    if (!(rep.rows[i].energy_center > 0.0)) throw InputError("liouville_decay_demo: |du|^2 vanishes at the center");
    la.push_back(std::log(rep.rows[i].a));
    le.push_back(std::log(rep.rows[i].energy_center));
    lg.push_back(0.5 * std::log(rep.rows[i].energy_center));
  }
  rep.energy_fit = fit_line(la, le);
  rep.gradient_fit = fit_line(la, lg);
  const bool steep = rep.energy_fit.slope <= -1.0 + kSlackZ * rep.energy_fit.slope_stderr;
  rep.status = rep.nonincreasing && steep ? Status::pass : Status::fail;
  return rep;
}

std::vector<double> annulus_oscillations(const ManifoldModel& manifold, const DriftField& V, double inner,
                                         const std::vector<double>& radii) {
  if (!(inner > 1.0)) throw InputError("annulus_oscillations: inner radius must exceed 1");
  for (double R : radii) {
    if (!(R > inner)) throw InputError("annulus_oscillations: outer radii must exceed the inner radius");
  }
  const double r_max = *std::max_element(radii.begin(), radii.end());
  if (r_max >= manifold.cut_locus_radius()) throw InputError("annulus_oscillations: radii reach the cut locus");
  const int n = manifold.dim();
  const Point origin = Point::Zero(n);
  // Radial drift component <V, d/dr> along the first axis; V is assumed
  // rotationally symmetric about the origin.
  auto radial_drift = [&](double r) {
    const Point x = point_at_distance(manifold, origin, r);
    Vec e = Vec::Zero(n);
    e(0) = 1.0;
    e /= manifold.norm(x, e);
    return manifold.inner(x, V.at(x), e);
  };
  // Scale function S with S' = exp(-int_1^r ((n-1) phi'/phi - v)).
  const std::size_t panels = 40000;
  const double step = (r_max - 1.0) / static_cast<double>(panels);
  std::vector<double> mu(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) {
    const double r = 1.0 + step * static_cast<double>(k);
    mu[k] = (n - 1) * sphere_log_derivative(manifold, r) - radial_drift(r);
  }
  const auto M = cumulative_integral(mu, step);
  std::vector<double> ds(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) ds[k] = std::exp(-M[k]);
  const auto S = cumulative_integral(ds, step);
  auto scale = [&](double r) {
    const double pos = (r - 1.0) / step;
    const auto k = static_cast<std::size_t>(std::min(std::floor(pos), static_cast<double>(panels - 1)));
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * S[k] + w * S[k + 1];
  };
  std::vector<double> out;
  for (double R : radii) out.push_back(scale(inner) / scale(R));
  return out;
}

BridgeReport recurrence_liouville_bridge(const BridgeSpec& spec) {
  require_geometric(spec.radii, "recurrence_liouville_bridge");
  if (!(spec.inner_radius < spec.radii.front())) throw InputError("recurrence_liouville_bridge: inner radius must lie inside every ball");
  BridgeReport rep;
  const int n = spec.manifold.dim();
  rep.scan = recurrence_scan(spec.manifold, spec.V, Point::Zero(n), spec.a, spec.r_start, spec.b_values, spec.ens,
                             spec.hitting);
  rep.radii = spec.radii;
  if (spec.family == OscillationFamily::annulus_profile) {
    rep.oscillations = annulus_oscillations(spec.manifold, spec.V, spec.inner_radius, spec.radii);
  } else {
    if (!spec.pattern) throw InputError("recurrence_liouville_bridge: boundary pattern missing");
    const Point center = Point::Zero(n);
    const BoundaryFn g = [&](const Point& x) { return spec.pattern((x - center) / (x - center).norm()); };
    for (double R : spec.radii) {
      const SolveResult res = solve(spec.manifold, center, R, R / spec.nodes_per_radius, g, spec.target, spec.V);
      const MapGrid& u = res.grid;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t node : u.interior_nodes()) {
        if ((u.position(node) - center).norm() > spec.inner_radius) continue;
        const double s = spec.gauge ? (*spec.gauge)(u.value(node)) : u.value(node)(0);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      rep.oscillations.push_back(hi - lo);
    }
  }
  for (double osc : rep.oscillations) {
    if (!(osc > 0.0)) throw InputError("recurrence_liouville_bridge: oscillation family is constant");
  }
  for (std::size_t k = 1; k + 1 < rep.oscillations.size(); ++k) {
    const double y0 = 1.0 / rep.oscillations[k - 1], y1 = 1.0 / rep.oscillations[k], y2 = 1.0 / rep.oscillations[k + 1];
    rep.increment_ratios.push_back((y2 - y1) / (y1 - y0));
  }
  const double q = spec.radii[1] / spec.radii[0];
  rep.decays = rep.increment_ratios.back() >= 1.0 / std::sqrt(q);
  const RecurrenceClass c = rep.scan.classification;
  if (c == RecurrenceClass::inconclusive) {
    rep.status = Status::inconclusive;
  } else {
    const bool consistent = (c == RecurrenceClass::recurrent) == rep.decays;
    rep.status = consistent ? Status::pass : Status::fail;
  }
  rep.summary = fmt::format("diffusion {}, oscillation {} (last 1/osc increment ratio {:.4g}, threshold {:.4g})",
                            to_string(c), rep.decays ? "decays" : "persists", rep.increment_ratios.back(),
                            1.0 / std::sqrt(q));
  return rep;
}

}  // namespace vharm
