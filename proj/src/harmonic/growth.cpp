#include "vharm/harmonic/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "vharm/bochner/bochner.hpp"
#include "vharm/errors.hpp"
#include "vharm/harmonic/solver.hpp"
#include "vharm/numerics.hpp"
#include "vharm/random.hpp"

namespace vharm {

namespace {

// Lattice points within the ball plus points on its sphere.
std::vector<Point> ball_samples(const Point& center, double a, int resolution) {
  const int n = static_cast<int>(center.size());
  const double step = a / resolution;
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(n), -resolution);
  while (true) {
    Point x = center;
    for (int d = 0; d < n; ++d) x(d) += step * idx[static_cast<std::size_t>(d)];
    if ((x - center).norm() <= a * (1.0 + 1e-12)) out.push_back(x);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] > resolution) idx[static_cast<std::size_t>(d++)] = -resolution;
    if (d == n) break;
  }
  if (n == 1) {
    out.push_back(center + make_vec({a}));
    out.push_back(center - make_vec({a}));
  } else if (n == 2) {
    const int count = 8 * resolution;
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      out.push_back(center + a * make_vec({std::cos(th), std::sin(th)}));
    }
  } else {
    // Fibonacci points on the sphere (first three coordinates).
    const int count = 4 * resolution * resolution;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      Point x = center;
      x(0) += a * rho * std::cos(golden * k);
      x(1) += a * rho * std::sin(golden * k);
      x(2) += a * z;
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

MapView MapView::from_grid(std::shared_ptr<const MapGrid> grid) {
  if (!grid) throw InputError("MapView: null grid");
  auto density = std::make_shared<const std::vector<double>>(vharm::energy_density(*grid));
  MapView v;
  v.target = grid->target();
  v.center = grid->center();
  v.radius = grid->radius();
  v.value = [grid](const Point& x) { return grid->interpolate(x); };
  v.energy_density = [grid, density](const Point& x) { return grid->interpolate(*density, x); };
  v.samples = [grid](double a) {
    std::vector<Point> out;
    for (std::size_t node : grid->interior_nodes()) {
      const Point x = grid->position(node);
      if ((x - grid->center()).norm() <= a + 1e-12) out.push_back(x);
    }
    return out;
  };
  v.sup_distance = [grid](const Point& o, double a) { return grid->sup_distance(o, a); };
  return v;
}

MapView MapView::from_map(const SmoothMapSpec& u, const Point& center, int resolution) {
  if (resolution < 2) throw InputError("MapView: resolution must be at least 2");
  MapView v;
  v.target = u.target();
  v.center = center;
  v.value = [u](const Point& x) { return u(x); };
  v.energy_density = [u](const Point& x) { return map_differential(u, x).norm2; };
  v.samples = [center, resolution](double a) { return ball_samples(center, a, resolution); };
  v.sup_distance = [u, center, resolution](const Point& o, double a) {
    double m = 0.0;
    for (const Point& x : ball_samples(center, a, resolution)) m = std::max(m, u.target().distance(o, u(x)));
    return m;
  };
  return v;
}

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::g3_sqrt_log: return "G3";
    case GrowthClass::g2_sqrt: return "G2";
    case GrowthClass::g1_sublinear: return "G1";
    case GrowthClass::superlinear: return "superlinear";
  }
  return "unknown";
}

bool GrowthProfile::satisfies(int g) const {
  if (g < 1 || g > 3) throw InputError("GrowthProfile: growth condition must be 1, 2 or 3");
  switch (growth_class) {
    case GrowthClass::bounded: return true;
    case GrowthClass::g3_sqrt_log: return true;
    case GrowthClass::g2_sqrt: return g <= 2;
    case GrowthClass::g1_sublinear: return g == 1;
    case GrowthClass::superlinear: return false;
  }
  return false;
}

GrowthProfile classify_growth(const std::vector<double>& radii, const std::vector<double>& m_values) {
  if (radii.size() < 4) throw InputError("classify_growth: at least 4 radii are required");
  if (m_values.size() != radii.size()) throw InputError("classify_growth: radii and m_u values differ in length");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1])) {
      throw InputError("classify_growth: radii must be positive and increasing");
    }
    if (!(m_values[i] >= 0.0)) throw InputError("classify_growth: m_u values must be nonnegative");
    if (i > 0 && m_values[i] < m_values[i - 1] * (1.0 - 1e-9)) {
      throw InputError("classify_growth: m_u must be nondecreasing in the radius");
    }
  }
  GrowthProfile g;
  g.radii = radii;
  g.m_values = m_values;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    g.ratio_linear.push_back(m_values[i] / radii[i]);
    g.ratio_sqrt.push_back(m_values[i] / std::sqrt(radii[i]));
    g.ratio_sqrt_log.push_back(m_values[i] / std::sqrt(std::log1p(radii[i])));
  }
  const std::size_t last = radii.size() - 1;
  std::vector<double> lx, ly;
  const std::size_t from = radii.size() - std::max<std::size_t>(3, (radii.size() + 1) / 2);
  for (std::size_t i = from; i <= last; ++i) {
    if (m_values[i] > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(m_values[i]));
    }
  }
  g.exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;

  if (m_values[last] <= m_values[last - 1] * 1.01) {
    g.growth_class = GrowthClass::bounded;
  } else if (g.exponent >= 0.9) {
    g.growth_class = GrowthClass::superlinear;
  } else if (g.exponent >= 0.55) {
    g.growth_class = GrowthClass::g1_sublinear;
  } else {
    const auto& r = g.ratio_sqrt_log;
    const bool decreasing = r[last] <= r[last - 1] && r[last - 1] <= r[last - 2];
    g.growth_class = decreasing ? GrowthClass::g3_sqrt_log : GrowthClass::g2_sqrt;
  }
  return g;
}

GrowthProfile classify_growth(const MapView& u, const Point& o, const std::vector<double>& radii) {
  if (radii.size() < 4) throw InputError("classify_growth: at least 4 radii are required");
  std::vector<double> m;
  for (double a : radii) {
    if (a > u.radius * (1.0 + 1e-12)) throw InputError(fmt::format("classify_growth: radius {} exceeds the map domain", a));
    m.push_back(u.sup_distance(o, a));
  }
  return classify_growth(radii, m);
}

GradientEstimateRow gradient_estimate(const MapGrid& u, const Point& o, double a) {
  if (!u.solved()) throw PreconditionError("gradient_estimate: grid is not solved to tolerance");
  if (!(a > 0.0) || 2.0 * a > u.radius() * (1.0 + 1e-12)) {
    throw InputError(fmt::format("gradient_estimate: B_2a with a = {} is not covered by the grid", a));
  }
  const auto density = energy_density(u);
  GradientEstimateRow row;
  row.a = a;
  for (std::size_t node : u.interior_nodes()) {
    if ((u.position(node) - u.center()).norm() <= a + 1e-12) row.sup_energy = std::max(row.sup_energy, density[node]);
  }
  row.m_u_2a = u.sup_distance(o, 2.0 * a);
  row.rho = row.sup_energy / std::pow(row.m_u_2a + 1.0, 2);
  return row;
}

GradientEstimateRow gradient_estimate(const MapView& u, const Point& o, double a) {
  if (!(a > 0.0) || 2.0 * a > u.radius * (1.0 + 1e-12)) {
    throw InputError(fmt::format("gradient_estimate: B_2a with a = {} is not covered by the map", a));
  }
  GradientEstimateRow row;
  row.a = a;
  for (const Point& x : u.samples(a)) row.sup_energy = std::max(row.sup_energy, u.energy_density(x));
  row.m_u_2a = u.sup_distance(o, 2.0 * a);
  row.rho = row.sup_energy / std::pow(row.m_u_2a + 1.0, 2);
  return row;
}

GradientEstimateReport gradient_estimate_check(std::vector<GradientEstimateRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  GradientEstimateReport rep;
  rep.rows = std::move(rows);
  if (rep.rows.size() < 2) return rep;
  double running = rep.rows.front().rho;
  rep.status = Status::pass;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].rho > 1.2 * running + 1e-14) rep.status = Status::fail;
    running = std::max(running, rep.rows[i].rho);
  }
  rep.fitted_constant = running;
  return rep;
}

ConvexGauge::ConvexGauge(double kappa, Point o)
    : kappa_(kappa), o_(std::move(o)), model_(ManifoldModel::sphere(static_cast<int>(o_.size()), kappa > 0.0 ? kappa : 1.0)) {
  if (!(kappa > 0.0)) throw InputError("ConvexGauge: kappa must be positive");
  model_.require_in_chart(o_);
}

double ConvexGauge::operator()(const Point& y) const {
  return 1.0 - std::cos(std::sqrt(kappa_) * model_.distance(y, o_));
}

double ConvexGauge::regular_radius() const { return std::numbers::pi / (2.0 * std::sqrt(kappa_)); }

ConvexGauge::ConvexityFit ConvexGauge::fit_convexity(double radius, std::size_t samples, std::uint64_t seed,
                                                     double tol) const {
  if (!(radius > 0.0) || radius >= regular_radius()) {
    throw InputError("ConvexGauge: sampling radius must lie inside the regular radius");
  }
  const int n = model_.dim();
  const double delta = 1e-3 * std::min(1.0, radius);
  ConvexityFit fit;
  fit.fitted_constant = std::numeric_limits<double>::infinity();
  fit.min_second_difference = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> diffs;
  for (std::size_t i = 0; i < samples; ++i) {
    RandomStream rng(seed, i);
    Vec dir(n), tangent(n);
    for (int d = 0; d < n; ++d) dir(d) = rng.normal();
    for (int d = 0; d < n; ++d) tangent(d) = rng.normal();
    const double r = (radius - delta) * rng.uniform();
    const Point p = model_.geodesic_point(o_, dir / model_.norm(o_, dir), r);
    const Vec u = tangent / model_.norm(p, tangent);
    const double fp = (*this)(model_.geodesic_point(p, u, delta));
    const double f0 = (*this)(p);
    const double fm = (*this)(model_.geodesic_point(p, u, -delta));
    const double d2 = (fp - 2.0 * f0 + fm) / (delta * delta);
    const double d1 = (fp - fm) / (2.0 * delta);
    diffs.emplace_back(d2, d1);
    fit.min_second_difference = std::min(fit.min_second_difference, d2);
    if (d1 * d1 > 1e-12) fit.fitted_constant = std::min(fit.fitted_constant, d2 / (d1 * d1));
  }
  fit.samples = samples;
  for (const auto& [d2, d1] : diffs) {
    if (d2 <= 0.0 || d2 < fit.fitted_constant * d1 * d1 - tol) ++fit.violations;
  }
  fit.status = (fit.fitted_constant > 0.0 && fit.violations == 0) ? Status::pass : Status::fail;
  return fit;
}

}  // namespace vharm
