#include "vharm/diffusion/checks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/numerics.hpp"

namespace vharm {

Status McReport::overall() const {
  bool boundary = false;
  bool inconclusive = false;
  for (const auto& row : rows) {
    if (row.status == Status::fail) return Status::fail;
    boundary |= row.status == Status::boundary;
    inconclusive |= row.status == Status::inconclusive || row.status == Status::low_power;
  }
  if (inconclusive) return Status::inconclusive;
  return boundary ? Status::boundary : Status::pass;
}

void write_mc_csv(std::ostream& out, const std::vector<McReport>& reports, bool header) {
  if (header) out << "experiment_id,t,statistic,mean,stderr,bound,verdict\n";
  for (const auto& rep : reports)
    for (const auto& row : rep.rows)
      fmt::print(out, "{},{:.12g},{},{:.12g},{:.12g},{:.12g},{}\n", rep.experiment_id, row.t, row.statistic,
                 row.estimate.mean, row.estimate.stderr_, row.bound, to_string(row.status));
}

std::vector<double> ito_residual(const ManifoldModel& M, const DriftField& V, const DiffusionPath& path,
                                 const ScalarField& f) {
  std::vector<double> m(path.points.size(), 0.0);
  if (path.points.empty()) return m;
  const double f0 = f.value(path.points.front());
  double integral = 0.0;
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    const std::size_t stop = path.exited ? path.exited->index : path.points.size();
    // Stopped paths accumulate no generator time after the exit.
    if (k <= stop) integral += laplacian_V(M, V, f, path.points[k - 1]) * (path.times[k] - path.times[k - 1]);
    m[k] = f.value(path.points[k]) - f0 - integral;
  }
  return m;
}

namespace {

double grad_norm2(const ManifoldModel& M, const ScalarField& f, const Point& x) {
  const Vec df = f.gradient(x);
  if (M.kind() == ManifoldKind::euclidean) return df.squaredNorm();
  return df.dot(M.inverse_metric_at(x) * df);
}

int steps_for(double t, double dt) {
  if (!(dt > 0) || !(t > 0)) throw InputError("need t > 0 and dt > 0");
  return std::max(1, static_cast<int>(std::lround(t / dt)));
}

}  // namespace

McRow ito_martingale_check(const ManifoldModel& M, const DriftField& V, const Point& x0, double t,
                           const ScalarField& f, const EnsembleSpec& ens) {
  M.require_in_chart(x0);
  const int K = steps_for(t, ens.dt);
  const double h = t / K;
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    Point x = x0;
    double integral = 0.0;
    for (int k = 0; k < K; ++k) {
      integral += laplacian_V(M, V, f, x) * h;
      x = step(M, V, x, brownian_increment(rng, M.dim(), h), h);
      M.require_in_chart(x);
    }
    return std::vector<double>{f.value(x) - f.value(x0) - integral};
  });
  McRow row{t, "ito_residual_mean", column_estimates(samples).front(), 0.0, Status::inconclusive};
  row.status = equality_status(row.estimate.mean, row.estimate.stderr_);
  return row;
}

QuadraticVariationResult ito_quadratic_variation(const ManifoldModel& M, const DriftField& V, const Point& x0,
                                                 double t, const ScalarField& f, const EnsembleSpec& ens) {
  M.require_in_chart(x0);
  const int K = steps_for(t, ens.dt);
  const double h = t / K;
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    Point x = x0;
    double qv = 0.0;
    double predicted = 0.0;
    double fx = f.value(x);
    for (int k = 0; k < K; ++k) {
      const double gen = laplacian_V(M, V, f, x) * h;
      predicted += 2.0 * grad_norm2(M, f, x) * h;
      x = step(M, V, x, brownian_increment(rng, M.dim(), h), h);
      M.require_in_chart(x);
      const double fn = f.value(x);
      const double dm = fn - fx - gen;
      qv += dm * dm;
      fx = fn;
    }
    return std::vector<double>{qv, predicted};
  });
  const auto est = column_estimates(samples);
  QuadraticVariationResult out{est[0], est[1], 0.0};
  out.relative_error = std::abs(est[0].mean - est[1].mean) / std::max(std::abs(est[1].mean), 1e-300);
  return out;
}

McRow generator_check(const ManifoldModel& M, const DriftField& V, const Point& x, const ScalarField& f, double dt,
                      std::size_t trials, std::uint64_t seed) {
  M.require_in_chart(x);
  const double fx = f.value(x);
  // Antithetic pairs cancel the first-order noise term.
  auto samples = run_ensemble(EnsembleSpec{trials, dt, seed, 0}, [&](std::size_t, RandomStream& rng) {
    const Vec dW = brownian_increment(rng, M.dim(), dt);
    const Point a = step(M, V, x, dW, dt);
    const Point b = step(M, V, x, Vec(-dW), dt);
    return std::vector<double>{0.5 * (f.value(a) + f.value(b)) - fx};
  });
  McRow row{dt, "generator_increment", column_estimates(samples).front(), dt * laplacian_V(M, V, f, x),
            Status::inconclusive};
  // Euler bias is O(dt^2); allow it explicitly next to the statistical slack.
  row.status = equality_status(row.estimate.mean - row.bound, row.estimate.stderr_, 10.0 * dt * dt);
  return row;
}

WeakOrderResult weak_order_check(const ManifoldModel& M, const DriftField& V, const Point& x0, double t,
                                 const std::function<double(const Point&)>& f, double dt0, int levels,
                                 const EnsembleSpec& ens) {
  if (levels < 3) throw InputError("weak order check needs at least three levels");
  M.require_in_chart(x0);
  const int K0 = steps_for(t, dt0);
  const int fine_factor = 1 << (levels - 1);
  const int KF = K0 * fine_factor;
  const double hf = t / KF;
  const int n = M.dim();
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    std::vector<Point> xs(static_cast<std::size_t>(levels), x0);
    std::vector<Vec> acc(static_cast<std::size_t>(levels), Vec::Zero(n));
    for (int k = 1; k <= KF; ++k) {
      const Vec dW = brownian_increment(rng, n, hf);
      for (int l = 0; l < levels; ++l) {
        acc[l] += dW;
        const int stride = fine_factor >> l;
        if (k % stride == 0) {
          xs[l] = step(M, V, xs[l], acc[l], hf * stride);
          M.require_in_chart(xs[l]);
          acc[l].setZero();
        }
      }
    }
    std::vector<double> out;
    for (int l = 0; l < levels; ++l) out.push_back(f(xs[l]));
    for (int l = 0; l + 1 < levels; ++l) out.push_back(out[l] - out[l + 1]);
    return out;
  });
  const auto est = column_estimates(samples);
  WeakOrderResult res;
  for (int l = 0; l < levels; ++l) {
    res.dts.push_back(t / (K0 << l));
    res.means.push_back(est[l]);
  }
  for (int l = 0; l + 1 < levels; ++l) res.differences.push_back(est[levels + l]);
  res.status = Status::pass;
  for (std::size_t l = 0; l + 1 < res.differences.size(); ++l) {
    const auto& a = res.differences[l];
    const auto& b = res.differences[l + 1];
    const double ratio = std::abs(a.mean) / std::abs(b.mean);
    res.ratios.push_back(ratio);
    if (std::abs(b.mean) <= kSlackZ * b.stderr_) {
      res.status = Status::inconclusive;
      continue;
    }
    if (ratio >= 1.5 && ratio <= 3.0) continue;
    const double lo = std::max(0.0, std::abs(a.mean) - kSlackZ * a.stderr_) / (std::abs(b.mean) + kSlackZ * b.stderr_);
    const double hi = (std::abs(a.mean) + kSlackZ * a.stderr_) / (std::abs(b.mean) - kSlackZ * b.stderr_);
    if (hi >= 1.5 && lo <= 3.0) {
      if (res.status == Status::pass) res.status = Status::boundary;
    } else {
      res.status = Status::fail;
    }
  }
  return res;
}

Status KendallReport::overall() const {
  McReport r = as_report("kendall");
  return r.overall();
}

McReport KendallReport::as_report(const std::string& id) const {
  McReport rep{id, {}, {}};
  for (const auto& row : rows) {
    rep.rows.push_back({row.t, "beta_mean", row.beta, 0.0, row.mean_status});
    rep.rows.push_back({row.t, "beta_quadratic_variation", row.quadratic_variation, row.t, row.qv_status});
  }
  return rep;
}

KendallReport kendall_check(const ManifoldModel& M, const DriftField& V, const Point& p, const Point& x0,
                            const std::vector<double>& t_grid, const EnsembleSpec& ens) {
  if (std::isfinite(M.cut_locus_radius()))
    throw UnsupportedConfigurationError("radial decomposition check needs a manifold without cut locus");
  if (t_grid.empty()) throw InputError("empty time grid");
  M.require_in_chart(x0);
  std::vector<long> idx;
  for (double t : t_grid) idx.push_back(std::lround(t / ens.dt));
  const long K = idx.back();
  const bool origin = p.squaredNorm() == 0.0;
  auto radius = [&](const Point& x) { return origin ? M.distance_from_origin(x) : M.distance(p, x); };
  const double r0 = radius(x0);
  const double s2 = std::sqrt(2.0);
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    std::vector<double> out(4 * t_grid.size());
    Point x = x0;
    double r = r0;
    double drift = 0.0;
    double qv = 0.0;
    std::size_t obs = 0;
    for (long k = 0; k <= K; ++k) {
      while (obs < idx.size() && idx[obs] == k) {
        out[4 * obs + 0] = (r - r0 - drift) / s2;
        out[4 * obs + 1] = qv;
        out[4 * obs + 2] = r;
        out[4 * obs + 3] = drift;
        ++obs;
      }
      if (k == K) break;
      const double lap = radial_laplacian(M, V, p, x) * ens.dt;
      x = step(M, V, x, brownian_increment(rng, M.dim(), ens.dt), ens.dt);
      M.require_in_chart(x);
      const double rn = radius(x);
      const double db = (rn - r - lap) / s2;
      qv += db * db;
      drift += lap;
      r = rn;
    }
    return out;
  });
  const auto est = column_estimates(samples);
  KendallReport rep;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    KendallRow row;
    row.t = t_grid[j];
    row.beta = est[4 * j];
    row.quadratic_variation = est[4 * j + 1];
    row.radius = est[4 * j + 2];
    row.drift_integral = est[4 * j + 3];
    row.mean_status = equality_status(row.beta.mean, row.beta.stderr_);
    row.qv_status = std::abs(row.quadratic_variation.mean - row.t) <= 0.05 * row.t ? Status::pass : Status::fail;
    rep.rows.push_back(row);
  }
  return rep;
}

double second_moment_envelope(double r0, double D, double t) {
  if (t < 0 || D < 0) throw InputError("envelope needs t >= 0 and D >= 0");
  const double a = r0 * r0;
  const double integral =
      adaptive_simpson([&](double s) { return (a + 2 * (1 + D) * s) * std::exp(-2 * D * s); }, 0.0, t, 1e-13);
  return a + 2 * (1 + D) * t + 2 * D * std::exp(2 * D * t) * integral;
}

double fourth_moment_envelope(double r0, double D, double t) {
  if (t < 0 || D < 0) throw InputError("envelope needs t >= 0 and D >= 0");
  const double a = std::pow(r0, 4);
  auto int_D = [&](double s) {
    return adaptive_simpson([&](double u) { return second_moment_envelope(r0, D, u); }, 0.0, s, 1e-11);
  };
  const double outer = adaptive_simpson(
      [&](double s) { return (a + 4 * (D + 3) * int_D(s)) * std::exp(-4 * D * s); }, 0.0, t, 1e-10);
  return a + 4 * (3 + D) * int_D(t) + 4 * D * std::exp(4 * D * t) * outer;
}

namespace {

double require_witness(std::optional<double> D, const char* what) {
  if (!D) throw PreconditionError(std::string(what) + " needs a witness D from a passing condition audit");
  if (!(*D >= 0)) throw InputError("witness D must be nonnegative");
  return *D;
}

McRow bound_row(double t, std::string stat, const McEstimate& e, double bound) {
  return {t, std::move(stat), e, bound, one_sided_status(bound - e.mean, e.stderr_)};
}

}  // namespace

McReport moment_bound_check(const ManifoldModel& M, const DriftField& V, const Point& p, const Point& x0,
                            std::optional<double> D_in, const std::vector<double>& t_grid, const EnsembleSpec& ens,
                            double exit_radius) {
  const double D = require_witness(D_in, "moment bound check");
  const double r0 = M.distance(p, x0);
  const bool origin = p.squaredNorm() == 0.0;
  auto radius = [&](const Point& x) { return origin ? M.distance_from_origin(x) : M.distance(p, x); };
  const auto est = expectations_at_times(
      M, V, x0, t_grid, ens,
      {[&](const Point& x) { return std::pow(radius(x), 2); }, [&](const Point& x) { return std::pow(radius(x), 4); }},
      SimulationOptions{p, exit_radius});
  McReport rep{"moment_bound", {}, {}};
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    rep.rows.push_back(bound_row(t_grid[j], "E[r^2]", est[j][0], second_moment_envelope(r0, D, t_grid[j])));
    rep.rows.push_back(bound_row(t_grid[j], "E[r^4]", est[j][1], fourth_moment_envelope(r0, D, t_grid[j])));
  }
  return rep;
}

McReport lyapunov_check(const ManifoldModel& M, const DriftField& V, const Point& p, const Point& x0,
                        std::optional<double> D_in, ConditionId condition, double t, const EnsembleSpec& ens,
                        double exit_radius) {
  const double D = require_witness(D_in, "Lyapunov check");
  const bool origin = p.squaredNorm() == 0.0;
  auto radius = [&](const Point& x) { return origin ? M.distance_from_origin(x) : M.distance(p, x); };
  std::function<double(double)> phi;
  double rate = 0.0;
  std::string name;
  switch (condition) {
    case ConditionId::B1:
      phi = [](double r) { return r * r; };
      rate = 2 * (1 + D);
      name = "E[r^2]";
      break;
    case ConditionId::B2:
      phi = [](double r) { return r - std::log1p(r); };
      rate = 1 + D;
      name = "E[r-log(1+r)]";
      break;
    case ConditionId::B3:
      phi = [](double r) { return std::log1p(r * r); };
      rate = 2 * (1 + D);
      name = "E[log(1+r^2)]";
      break;
    default: throw InputError("Lyapunov check applies to B1, B2 or B3");
  }
  const auto est = expectation_at_times(M, V, x0, {t}, ens, [&](const Point& x) { return phi(radius(x)); },
                                        SimulationOptions{p, exit_radius});
  McReport rep{"lyapunov_" + to_string(condition), {}, {}};
  rep.rows.push_back(bound_row(t, name, est[0], phi(M.distance(p, x0)) + rate * t));
  return rep;
}

McReport conservativeness_check(const ManifoldModel& M, const DriftField& V, const Point& p, const Point& x0,
                                std::optional<double> D_in, const std::vector<double>& radii, double t,
                                const EnsembleSpec& ens) {
  const double D = require_witness(D_in, "conservativeness check");
  if (radii.empty()) throw InputError("conservativeness check needs radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw InputError("radii must be increasing");
  const bool origin = p.squaredNorm() == 0.0;
  auto radius = [&](const Point& x) { return origin ? M.distance_from_origin(x) : M.distance(p, x); };
  const int K = steps_for(t, ens.dt);
  const double h = t / K;
  const double R_max = radii.back();
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    Point x = x0;
    double sup = radius(x);
    for (int k = 0; k < K && sup < R_max; ++k) {
      const Point next = step(M, V, x, brownian_increment(rng, M.dim(), h), h);
      if (!M.in_chart(next)) {
        sup = std::numeric_limits<double>::infinity();
        break;
      }
      x = next;
      sup = std::max(sup, radius(x));
    }
    std::vector<double> out;
    for (double R : radii) out.push_back(sup >= R ? 1.0 : 0.0);
    return out;
  });
  const auto est = column_estimates(samples);
  const double envelope = second_moment_envelope(M.distance(p, x0), D, t);
  McReport rep{"conservativeness", {}, {}};
  for (std::size_t i = 0; i < radii.size(); ++i)
    rep.rows.push_back(bound_row(t, fmt::format("P(exit B_{:g})", radii[i]), est[i],
                                 std::min(1.0, envelope / (radii[i] * radii[i]))));
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (est[i].mean > est[i - 1].mean) rep.notes.push_back("exit fraction increased with the radius");
  rep.notes.push_back(fmt::format("exit fraction at R={:g}: {:.6g}", R_max, est.back().mean));
  return rep;
}

}  // namespace vharm
