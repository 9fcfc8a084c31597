#include "vharm/comparison/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/numerics.hpp"

namespace vharm {

std::string to_string(ConditionId id) {
  static const char* names[] = {"A1", "A2", "A3", "B1", "B2", "B3"};
  return names[static_cast<int>(id)];
}

ConditionId parse_condition(const std::string& text) {
  for (int i = 0; i < 6; ++i)
    if (to_string(static_cast<ConditionId>(i)) == text) return static_cast<ConditionId>(i);
  throw InputError("unknown condition '" + text + "'");
}

const ConditionReport* AuditResult::find(ConditionId id) const {
  for (const auto& r : reports)
    if (r.id == id) return &r;
  return nullptr;
}

namespace {

struct Sample {
  double radius;
  double lhs;
  double required;  // smallest D making the inequality hold at this radius
};

struct Stabilized {
  bool holds = true;
  double witness = 1.0;
  std::vector<std::pair<double, double>> violations;
};

// Finite samples cannot certify "there exists D": a witness is accepted when
// the constant needed on the outermost doubling does not exceed the one
// needed inside it by more than the stabilization tolerance.
Stabilized stabilize(const std::vector<Sample>& samples, double floor, double inner_limit, double tol) {
  Stabilized s;
  double inner = std::max(1.0, floor);
  double outer = 0.0;
  bool has_outer = false;
  for (const auto& smp : samples) {
    if (smp.radius <= inner_limit) inner = std::max(inner, smp.required);
    else {
      outer = std::max(outer, smp.required);
      has_outer = true;
    }
  }
  s.witness = std::max(inner, outer);
  if (!has_outer) return s;
  if (outer > (1.0 + tol) * inner) {
    s.holds = false;
    for (const auto& smp : samples)
      if (smp.radius > inner_limit && smp.required > (1.0 + tol) * inner) s.violations.emplace_back(smp.radius, smp.lhs);
  }
  return s;
}

struct RayData {
  double step = 0.0;
  std::vector<double> radii;       // node radii
  std::vector<double> v_sup;       // sampled sup of |V| over B_t
  std::vector<double> v_integral;  // int_0^t v
  std::vector<double> f_max;       // sup of f_V over B_t
  std::vector<double> f_min;       // inf of f_V over B_t
  double min_radial = 0.0;
};

RayData collect(const ComparisonInput& input, const RadialFrame& frame, double R) {
  RayData d;
  const int panels = static_cast<int>(std::ceil(1000.0 * std::max(1.0, R)));
  d.step = R / panels;
  const auto count = static_cast<std::size_t>(panels) + 1;
  d.radii.resize(count);
  for (std::size_t k = 0; k < count; ++k) d.radii[k] = static_cast<double>(k) * d.step;
  d.v_sup.assign(count, 0.0);
  d.f_max.assign(count, 0.0);
  d.f_min.assign(count, 0.0);
  if (!input.drift.identically_zero()) {
    d.min_radial = INFINITY;
    for (const auto& dir : frame.directions) {
      const RayProfile prof = ray_profile(input, dir, R, d.step);
      double run_v = 0.0, run_max = 0.0, run_min = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        run_v = std::max(run_v, prof.drift_norm[k]);
        run_max = std::max(run_max, prof.v_gamma[k]);
        run_min = std::min(run_min, prof.v_gamma[k]);
        d.v_sup[k] = std::max(d.v_sup[k], run_v);
        d.f_max[k] = std::max(d.f_max[k], run_max);
        d.f_min[k] = std::min(d.f_min[k], run_min);
        d.min_radial = std::min(d.min_radial, prof.radial_component[k]);
      }
    }
    const auto& profile = input.drift.radial_sup_profile();
    if (profile && input.base.norm() == 0.0) {
      for (std::size_t k = 0; k < count; ++k) d.v_sup[k] = profile(d.radii[k]);
    }
  }
  d.v_integral = cumulative_integral(d.v_sup, d.step);
  return d;
}

double interp(const RayData& d, const std::vector<double>& values, double t) {
  const double pos = t / d.step;
  const auto last = values.size() - 1;
  if (pos >= static_cast<double>(last)) return values.back();
  const auto k = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

}  // namespace

std::vector<double> radial_sup_profile(const ComparisonInput& input, const RadialFrame& frame,
                                       const std::vector<double>& radii) {
  if (radii.empty()) throw InputError("empty radius sample");
  const double R = *std::max_element(radii.begin(), radii.end());
  const RayData d = collect(input, frame, R);
  std::vector<double> out;
  for (double r : radii) out.push_back(interp(d, d.v_sup, r));
  return out;
}

AuditResult audit_conditions(const ComparisonInput& input, const RadialFrame& frame,
                             const std::vector<ConditionId>& which, const AuditOptions& options) {
  const auto& M = input.manifold;
  const int n = M.dim();
  std::vector<double> grid;
  for (double r = options.r0; r <= frame.max_radius * (1 + 1e-12); r *= 2.0) grid.push_back(r);
  if (grid.empty() || which.empty()) throw InputError("empty radius sample");
  const double R = grid.back();
  const double inner_limit = grid.size() > 1 ? grid[grid.size() - 2] : R;
  std::vector<double> samples;
  const int sub = std::max(1, options.subsamples);
  for (int j = -2 * sub;; ++j) {
    const double r = options.r0 * std::pow(2.0, static_cast<double>(j) / sub);
    if (r > R * (1 + 1e-12)) break;
    samples.push_back(std::min(r, R));
  }

  const RayData data = collect(input, frame, R);

  // Worst measured r * Delta_V r over the frame directions at each sample radius.
  std::vector<double> q(samples.size(), -INFINITY);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    for (const auto& dir : frame.directions) {
      const Point x = M.geodesic_point(input.base, dir, samples[j]);
      q[j] = std::max(q[j], samples[j] * radial_laplacian(M, input.drift, input.base, x));
    }
  }
  auto q_at_grid = [&](double r) {
    double best = -INFINITY;
    for (std::size_t j = 0; j < samples.size(); ++j)
      if (std::abs(samples[j] - r) <= 1e-12 * r) best = std::max(best, q[j]);
    return best;
  };

  const bool a_applicable = M.dim() > 0 && (input.m.is_minus_infinity() || (!input.m.is_infinite() && input.m.value() < n));
  const double gap = input.m.is_minus_infinity() ? INFINITY : (input.m.is_infinite() ? 0.0 : n - input.m.value());

  AuditResult result;
  for (ConditionId id : which) {
    ConditionReport rep;
    rep.id = id;
    switch (id) {
      case ConditionId::B1:
      case ConditionId::B2:
      case ConditionId::B3: {
        const int i = static_cast<int>(id) - static_cast<int>(ConditionId::B1) + 1;
        auto growth = [i](double r) { return 1.0 + std::pow(r, i - 1); };
        std::vector<Sample> s;
        for (std::size_t j = 0; j < samples.size(); ++j) s.push_back({samples[j], q[j], q[j] / growth(samples[j])});
        const double limit = (n - 1) / growth(0.0);
        const auto st = stabilize(s, limit, inner_limit, options.stabilization);
        rep.holds = st.holds;
        rep.witness = st.witness;
        rep.violations = st.violations;
        for (double r : grid) {
          const double lhs = q_at_grid(r);
          const double rhs = st.witness * growth(r);
          result.rows.push_back({id, r, lhs, rhs, st.witness, lhs <= rhs * (1 + 1e-12)});
        }
        break;
      }
      case ConditionId::A2:
      case ConditionId::A3: {
        if (!a_applicable) {
          rep.holds = false;
          rep.note = "not applicable: requires m < n";
          break;
        }
        const bool quadratic = id == ConditionId::A3;
        auto growth = [quadratic](double r) { return quadratic ? 1.0 + r * r : 1.0 + r; };
        if (std::isinf(gap)) {
          rep.holds = true;
          rep.note = "m = -inf: right-hand side is infinite";
          for (double r : grid) result.rows.push_back({id, r, interp(data, data.v_integral, r), INFINITY, 1.0, true});
          break;
        }
        std::vector<Sample> plain, starred;
        for (double r : samples) {
          const double iv = interp(data, data.v_integral, r);
          plain.push_back({r, iv, std::exp(4.0 * iv / gap) / growth(r)});
          const double osc = interp(data, data.f_max, r) - interp(data, data.f_min, r);
          starred.push_back({r, osc, std::exp(2.0 * osc / gap) / growth(r)});
        }
        const auto p = stabilize(plain, 1.0, inner_limit, options.stabilization);
        const auto s = stabilize(starred, 1.0, inner_limit, options.stabilization);
        rep.starred_holds = s.holds;
        rep.holds = p.holds || s.holds;
        rep.witness = p.holds ? p.witness : s.witness;
        if (p.holds) rep.note = to_string(id);
        if (s.holds) rep.note += std::string(rep.note.empty() ? "" : "; ") + to_string(id) + "*";
        if (!rep.holds) rep.violations = p.violations;
        for (double r : grid) {
          const double iv = interp(data, data.v_integral, r);
          const double rhs = gap / 4.0 * std::log(p.witness * growth(r));
          result.rows.push_back({id, r, iv, rhs, p.witness, iv <= rhs + 1e-12});
        }
        break;
      }
      case ConditionId::A1: {
        if (!a_applicable) {
          rep.holds = false;
          rep.note = "not applicable: requires m < n";
          break;
        }
        const double total = data.v_integral.back();
        const double tail = total - interp(data, data.v_integral, inner_limit);
        const bool integrable = total == 0.0 || (grid.size() > 1 && tail <= options.stabilization * total);
        const bool radial_nonneg = data.min_radial >= -1e-12;
        const double osc_outer = data.f_max.back() - data.f_min.back();
        const double osc_inner = interp(data, data.f_max, inner_limit) - interp(data, data.f_min, inner_limit);
        const bool bounded = osc_outer == 0.0 || (grid.size() > 1 && osc_outer <= (1.0 + options.stabilization) * osc_inner);
        std::vector<std::string> paths;
        if (integrable) paths.push_back("A1 (v integrable)");
        if (radial_nonneg) paths.push_back("A1 (radial component of V nonnegative)");
        if (bounded) paths.push_back("A1* (f_V bounded)");
        if (radial_nonneg) paths.push_back("A1* (f_V nondecreasing along rays)");
        rep.starred_holds = bounded || radial_nonneg;
        rep.holds = !paths.empty();
        for (const auto& p : paths) rep.note += (rep.note.empty() ? "" : "; ") + p;
        if (!rep.holds) rep.violations.emplace_back(R, data.min_radial);
        for (double r : grid)
          result.rows.push_back({id, r, interp(data, data.v_integral, r), total, 1.0, rep.holds});
        break;
      }
    }
    result.reports.push_back(std::move(rep));
  }
  return result;
}

std::vector<std::string> implication_counterexamples(const AuditResult& audit, bool ricci_nonnegative) {
  std::vector<std::string> out;
  if (!ricci_nonnegative) return out;
  const ConditionId as[] = {ConditionId::A1, ConditionId::A2, ConditionId::A3};
  const ConditionId bs[] = {ConditionId::B1, ConditionId::B2, ConditionId::B3};
  for (int i = 0; i < 3; ++i) {
    const auto* a = audit.find(as[i]);
    const auto* b = audit.find(bs[i]);
    if (a && b && a->holds && !b->holds)
      out.push_back(to_string(as[i]) + " holds but " + to_string(bs[i]) + " fails");
  }
  return out;
}

void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows) {
  out << "condition_id,radius,lhs,rhs,D_witness,pass\n";
  for (const auto& r : rows)
    out << fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g},{}\n", to_string(r.id), r.radius, r.lhs, r.rhs, r.witness,
                       r.pass ? "true" : "false");
}

}  // namespace vharm
