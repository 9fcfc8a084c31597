#include "vharm/diffusion/engine.hpp"

#include <cmath>

#include "vharm/errors.hpp"
#include "vharm/parallel.hpp"

namespace vharm {

namespace {

bool is_origin(const Point& p) { return p.squaredNorm() == 0.0; }

int grid_steps(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InputError("diffusion needs dt > 0 and t_end >= 0");
  return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

Point step(const ManifoldModel& M, const DriftField& V, const Point& x, const Vec& dW, double dt) {
  if (!(dt > 0.0)) throw InputError("step needs dt > 0");
  const double s2 = std::sqrt(2.0);
  Point next;
  switch (M.kind()) {
    case ManifoldKind::euclidean: next = x + s2 * dW; break;
    case ManifoldKind::sphere:
    case ManifoldKind::hyperbolic: {
      const double q = 1.0 + M.kappa() * x.squaredNorm();
      const double inv_lambda = 0.5 * q;
      next = x + (s2 * inv_lambda) * dW;
      if (M.dim() != 2) next += ((M.dim() - 2) * inv_lambda * inv_lambda * dt * (-2.0 * M.kappa() / q)) * x;
      break;
    }
    case ManifoldKind::rotationally_symmetric:
      next = x + s2 * (M.noise_factor(x) * dW) + dt * M.laplacian_drift(x);
      break;
  }
  if (!V.identically_zero()) next -= dt * V.at(x);
  return next;
}

Vec brownian_increment(RandomStream& rng, int n, double dt) {
  const double s = std::sqrt(dt);
  Vec dW(n);
  for (int i = 0; i < n; ++i) dW(i) = s * rng.normal();
  return dW;
}

Point point_at_distance(const ManifoldModel& M, const Point& p, double r) {
  Vec u = Vec::Zero(M.dim());
  u(0) = 1.0;
  u /= M.norm(p, u);
  return M.geodesic_point(p, u, r);
}

namespace {

struct Walk {
  const ManifoldModel& M;
  const DriftField& V;
  Point base;
  bool origin;
  double exit_radius;

  Walk(const ManifoldModel& m, const DriftField& v, const SimulationOptions& o)
      : M(m), V(v), base(o.base ? *o.base : Point(Vec::Zero(m.dim()))), origin(is_origin(base)),
        exit_radius(o.exit_radius) {}

  double radius(const Point& x) const { return origin ? M.distance_from_origin(x) : M.distance(base, x); }
};

}  // namespace

DiffusionPath simulate(const ManifoldModel& M, const DriftField& V, const Point& x0, double t_end, double dt,
                       const RngSpec& spec, const SimulationOptions& options) {
  M.require_in_chart(x0);
  const int K = grid_steps(t_end, dt);
  const double h = K > 0 ? t_end / K : dt;
  const Walk walk(M, V, options);
  RandomStream rng(spec);
  DiffusionPath path;
  path.times.reserve(K + 1);
  path.points.reserve(K + 1);
  path.radial.reserve(K + 1);
  path.brownian_increments.reserve(K);
  path.local_time_residual.assign(K, 0.0);
  Point x = x0;
  double r = walk.radius(x);
  path.times.push_back(0.0);
  path.points.push_back(x);
  path.radial.push_back(r);
  if (r >= walk.exit_radius) path.exited = ExitEvent{0, "domain"};
  for (int k = 0; k < K; ++k) {
    const Vec dW = brownian_increment(rng, M.dim(), h);
    path.brownian_increments.push_back(dW);
    if (!path.exited) {
      const Point next = step(M, V, x, dW, h);
      if (!M.in_chart(next)) {
        path.exited = ExitEvent{static_cast<std::size_t>(k + 1), "chart"};
      } else {
        x = next;
        r = walk.radius(x);
        if (r >= walk.exit_radius) path.exited = ExitEvent{static_cast<std::size_t>(k + 1), "domain"};
      }
    }
    path.times.push_back((k + 1) * h);
    path.points.push_back(x);
    path.radial.push_back(r);
  }
  return path;
}

std::vector<std::vector<double>> run_ensemble(
    const EnsembleSpec& ens, const std::function<std::vector<double>(std::size_t, RandomStream&)>& sample) {
  if (ens.n_paths == 0) throw InputError("ensemble needs at least one path");
  std::vector<std::vector<double>> out(ens.n_paths);
  const unsigned threads = ens.threads ? ens.threads : default_thread_count();
  parallel_for(ens.n_paths, threads, [&](std::size_t i) {
    RandomStream rng(ens.seed, i);
    out[i] = sample(i, rng);
  });
  return out;
}

std::vector<McEstimate> column_estimates(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) return {};
  const std::size_t cols = samples.front().size();
  std::vector<McEstimate> est(cols);
  std::vector<double> column(samples.size());
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i].at(c);
    est[c] = estimate(column);
  }
  return est;
}

std::vector<McEstimate> expectation_at_times(const ManifoldModel& M, const DriftField& V, const Point& x0,
                                             const std::vector<double>& t_grid, const EnsembleSpec& ens,
                                             const std::function<double(const Point&)>& f,
                                             const SimulationOptions& options) {
  auto est = expectations_at_times(M, V, x0, t_grid, ens, {f}, options);
  std::vector<McEstimate> out;
  for (auto& row : est) out.push_back(row.front());
  return out;
}

std::vector<std::vector<McEstimate>> expectations_at_times(
    const ManifoldModel& M, const DriftField& V, const Point& x0, const std::vector<double>& t_grid,
    const EnsembleSpec& ens, const std::vector<std::function<double(const Point&)>>& fs,
    const SimulationOptions& options) {
  M.require_in_chart(x0);
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    if (t_grid[j] < 0 || (j > 0 && t_grid[j] < t_grid[j - 1])) throw InputError("time grid must be increasing");
  const Walk walk(M, V, options);
  const std::size_t nf = fs.size();
  // Observation indices on the uniform grid of step dt.
  std::vector<long> idx;
  for (double t : t_grid) idx.push_back(std::lround(t / ens.dt));
  const long K = idx.empty() ? 0 : idx.back();
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    std::vector<double> values(t_grid.size() * nf);
    auto record = [&](std::size_t obs, const Point& x) {
      for (std::size_t i = 0; i < nf; ++i) values[obs * nf + i] = fs[i](x);
    };
    Point x = x0;
    bool stopped = walk.radius(x) >= walk.exit_radius;
    std::size_t next_obs = 0;
    for (long k = 0; k <= K; ++k) {
      while (next_obs < idx.size() && idx[next_obs] == k) record(next_obs++, x);
      if (k == K) break;
      if (stopped) {
        // A stopped path keeps its value; later draws would be discarded anyway.
        while (next_obs < idx.size()) record(next_obs++, x);
        break;
      }
      const Vec dW = brownian_increment(rng, M.dim(), ens.dt);
      const Point next = step(M, V, x, dW, ens.dt);
      if (!M.in_chart(next)) {
        stopped = true;
        continue;
      }
      x = next;
      if (walk.radius(x) >= walk.exit_radius) stopped = true;
    }
    return values;
  });
  const auto flat = column_estimates(samples);
  std::vector<std::vector<McEstimate>> out(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    out[j].assign(flat.begin() + static_cast<long>(j * nf), flat.begin() + static_cast<long>((j + 1) * nf));
  return out;
}

}  // namespace vharm
