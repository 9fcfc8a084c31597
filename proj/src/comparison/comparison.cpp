#include "vharm/comparison/comparison.hpp"

#include <cmath>

#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/numerics.hpp"
#include "vharm/random.hpp"

namespace vharm {

RadialFrame RadialFrame::make(const ManifoldModel& manifold, Point base, std::vector<Vec> directions,
                              double max_radius) {
  manifold.require_in_chart(base);
  if (directions.empty()) throw InputError("radial frame needs at least one direction");
  if (!(max_radius > 0)) throw InputError("radial frame needs a positive maximal radius");
  if (max_radius >= manifold.cut_locus_radius())
    throw CutLocusError("radial frame radius reaches the cut locus");
  for (auto& d : directions) {
    if (d.size() != manifold.dim()) throw InputError("direction has wrong dimension");
    const double norm = manifold.norm(base, d);
    if (!(norm > 0)) throw InputError("zero direction in radial frame");
    d /= norm;
  }
  return RadialFrame{std::move(base), std::move(directions), max_radius};
}

RadialFrame RadialFrame::uniform(const ManifoldModel& manifold, Point base, int count, double max_radius) {
  const int n = manifold.dim();
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs = {make_vec({1.0}), make_vec({-1.0})};
  } else if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * M_PI * k / count;
      dirs.push_back(make_vec({std::cos(a), std::sin(a)}));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      dirs.push_back(Vec::Unit(n, i));
      dirs.push_back(-Vec::Unit(n, i));
    }
    RandomStream rng(0x5eed, 0);
    while (static_cast<int>(dirs.size()) < count) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v(i) = rng.normal();
      dirs.push_back(v / v.norm());
    }
  }
  return make(manifold, std::move(base), std::move(dirs), max_radius);
}

double default_c_p(const ManifoldModel& manifold, const DriftField& drift, const EffectiveDimension& m,
                   const Point& base) {
  const int n = manifold.dim();
  if (!drift.potential() || m.is_infinite() || m.value() >= n) return 1.0;
  return std::exp(-2.0 * drift.potential()->value(base) / (n - m.value()));
}

ComparisonInput ComparisonInput::make(ManifoldModel manifold, DriftField drift, EffectiveDimension m, double kappa,
                                      Point base, std::optional<double> c_p) {
  m.validate_for(manifold.dim());
  manifold.require_in_chart(base);
  if (drift.dim() != manifold.dim()) throw InputError("drift dimension does not match the manifold");
  const double cp = c_p ? *c_p : default_c_p(manifold, drift, m, base);
  if (!(cp > 0)) throw InvalidConfigurationError("C_p must be positive");
  return ComparisonInput{std::move(manifold), std::move(drift), m, kappa, cp, std::move(base)};
}

double RayProfile::at(const std::vector<double>& values, double t) const {
  if (values.empty()) return 0.0;
  const double pos = t / step;
  if (pos <= 0) return values.front();
  const auto last = values.size() - 1;
  if (pos >= static_cast<double>(last)) return values.back();
  const auto k = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

double ray_step(double r) {
  int panels = static_cast<int>(std::ceil(1000.0 * std::max(1.0, r)));
  if (panels % 2) ++panels;
  return r / panels;
}

RayProfile ray_profile(const ComparisonInput& input, const Vec& direction, double r_max, double step) {
  const auto& M = input.manifold;
  if (r_max >= M.cut_locus_radius()) throw CutLocusError("ray reaches the cut locus");
  const auto count = static_cast<std::size_t>(std::llround(r_max / step)) + 1;
  RayProfile prof;
  prof.step = step;
  prof.radial_component.resize(count);
  prof.drift_norm.resize(count);
  const bool zero = input.drift.identically_zero();
  for (std::size_t k = 0; k < count; ++k) {
    if (zero) continue;
    const double t = static_cast<double>(k) * step;
    const Point x = M.geodesic_point(input.base, direction, t);
    const Vec vel = M.geodesic_velocity(input.base, direction, t);
    const Vec V = input.drift.at(x);
    prof.radial_component[k] = M.inner(x, V, vel);
    prof.drift_norm[k] = M.norm(x, V);
  }
  prof.v_gamma = cumulative_integral(prof.radial_component, step);
  return prof;
}

namespace {

int panels_for(double r) {
  int panels = static_cast<int>(std::ceil(1000.0 * std::max(1.0, r)));
  return panels % 2 ? panels + 1 : panels;
}

double finite_gap(const ComparisonInput& input) {
  if (input.m.is_infinite()) throw InvalidConfigurationError("comparison path needs a finite effective dimension");
  const double gap = input.dim() - input.m.value();
  if (gap == 0.0) throw InvalidConfigurationError("m = n has no generalized comparison function");
  return gap;
}

void check_radius(const ComparisonInput& input, double r) {
  if (!(r > 0)) throw DomainError("radius must be positive");
  if (r >= input.manifold.cut_locus_radius()) throw CutLocusError("radius at or beyond the cut locus");
}

}  // namespace

double f_V_along_ray(const ComparisonInput& input, const Vec& direction, double r) {
  if (r == 0.0) return 0.0;
  check_radius(input, r);
  if (input.drift.identically_zero()) return 0.0;
  const int panels = panels_for(r);
  return ray_profile(input, direction, r, r / panels).v_gamma.back();
}

double s_p(const ComparisonInput& input, const Vec& direction, double r) {
  const double gap = finite_gap(input);
  if (r == 0.0) return 0.0;
  check_radius(input, r);
  if (input.drift.identically_zero()) return input.c_p * r;
  const int panels = panels_for(r);
  const double step = r / panels;
  const RayProfile prof = ray_profile(input, direction, r, step);
  double s = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * std::exp(-2.0 * prof.v_gamma[static_cast<std::size_t>(k)] / gap);
  }
  return input.c_p * s * step / 3.0;
}

double cot_kappa(double kappa, double r) {
  if (r == 0.0) throw PoleError("cot_kappa has a pole at r = 0");
  if (r < 0.0) throw DomainError("cot_kappa needs r > 0");
  if (kappa > 0) {
    const double s = std::sqrt(kappa);
    if (r >= M_PI / s) throw DomainError("cot_kappa needs r < pi/sqrt(kappa)");
    return s / std::tan(s * r);
  }
  if (kappa < 0) {
    const double s = std::sqrt(-kappa);
    return s / std::tanh(s * r);
  }
  return 1.0 / r;
}

double classical_comparison_bound(double m, double kappa, double r) {
  if (!std::isfinite(m)) throw InvalidConfigurationError("classical comparison needs a finite m");
  return (m - 1.0) * cot_kappa(kappa, r);
}

double laplacian_comparison_bound(const ComparisonInput& input, const Vec& direction, double r) {
  const int n = input.dim();
  if (input.m.is_infinite())
    throw InvalidConfigurationError("no explicit comparison function for m = +-inf");
  const double m = input.m.value();
  if (m >= n) {
    if (m == n && !input.drift.identically_zero())
      throw InvalidConfigurationError("m = n requires V = 0");
    return classical_comparison_bound(m, input.kappa, r);
  }
  const double gap = finite_gap(input);
  const double s = s_p(input, direction, r);
  const double fv = f_V_along_ray(input, direction, r);
  return gap * cot_kappa(input.kappa, s) * std::exp(-2.0 * fv / gap) * input.c_p;
}

double measured_radial_laplacian(const ComparisonInput& input, const Vec& direction, double r) {
  check_radius(input, r);
  const Point x = input.manifold.geodesic_point(input.base, direction, r);
  return radial_laplacian_measured(input.manifold, input.drift, input.base, x);
}

}  // namespace vharm
