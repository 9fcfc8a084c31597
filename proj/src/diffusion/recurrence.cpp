#include "vharm/diffusion/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vharm/errors.hpp"

namespace vharm {

std::string to_string(RecurrenceClass c) {
  switch (c) {
    case RecurrenceClass::recurrent: return "recurrent";
    case RecurrenceClass::transient: return "transient";
    case RecurrenceClass::inconclusive: return "inconclusive";
  }
  return "?";
}

HittingEstimate recurrence_probe(const ManifoldModel& M, const DriftField& V, const Point& p, double a, double b,
                                 double r_start, const EnsembleSpec& ens, const HittingOptions& opts) {
  if (!(0 < a && a < r_start && r_start < b)) throw InputError("recurrence probe needs 0 < a < r_start < b");
  if (b >= M.cut_locus_radius()) throw InputError("outer sphere must lie inside the cut locus");
  const Point x0 = point_at_distance(M, p, r_start);
  M.require_in_chart(point_at_distance(M, p, b));
  const bool origin = p.squaredNorm() == 0.0;
  auto radius = [&](const Point& x) { return origin ? M.distance_from_origin(x) : M.distance(p, x); };
  const double dt_max = ens.dt;
  auto samples = run_ensemble(ens, [&](std::size_t, RandomStream& rng) {
    Point x = x0;
    double r = r_start;
    for (std::size_t k = 0; k < opts.max_steps; ++k) {
      const double d = std::min(r - a, b - r);
      const double dt = std::clamp(0.5 * std::pow(opts.accuracy * d, 2), opts.dt_min, dt_max);
      const Point next = step(M, V, x, brownian_increment(rng, M.dim(), dt), dt);
      if (!M.in_chart(next)) return std::vector<double>{0.0, 0.0, double(k + 1)};
      const double rn = radius(next);
      if (rn <= a) return std::vector<double>{1.0, 0.0, double(k + 1)};
      if (rn >= b) return std::vector<double>{0.0, 0.0, double(k + 1)};
      // The radial part has diffusion coefficient 2, so a bridge between
      // distances d0, d1 from a sphere crosses it with probability exp(-d0 d1/dt).
      const double u = rng.uniform();
      const double p_in = std::exp(-(r - a) * (rn - a) / dt);
      const double p_out = std::exp(-(b - r) * (b - rn) / dt);
      if (u < p_in) return std::vector<double>{1.0, 0.0, double(k + 1)};
      if (u < p_in + p_out) return std::vector<double>{0.0, 0.0, double(k + 1)};
      x = next;
      r = rn;
    }
    return std::vector<double>{0.0, 1.0, double(opts.max_steps)};
  });
  HittingEstimate out;
  out.a = a;
  out.b = b;
  out.r_start = r_start;
  std::vector<double> hits;
  double censored = 0.0;
  double steps = 0.0;
  for (const auto& s : samples) {
    steps += s[2];
    if (s[1] > 0) {
      censored += 1.0;
      continue;
    }
    hits.push_back(s[0]);
  }
  out.censored_fraction = censored / static_cast<double>(samples.size());
  out.mean_steps = steps / static_cast<double>(samples.size());
  if (hits.empty()) throw NoConvergenceError("every path exhausted the step budget");
  out.probability = estimate(hits);
  if (out.censored_fraction > 0.0)
    out.warnings.push_back(fmt::format("{:.4g}% of paths censored by the step budget", 100 * out.censored_fraction));
  if (out.censored_fraction > 0.01) out.status = Status::low_power;
  return out;
}

RecurrenceScan recurrence_scan(const ManifoldModel& M, const DriftField& V, const Point& p, double a,
                               double r_start, const std::vector<double>& b_values, const EnsembleSpec& ens,
                               const HittingOptions& opts) {
  if (b_values.size() < 3) throw InputError("recurrence scan needs at least three outer radii");
  const double q = b_values[1] / b_values[0];
  if (!(q >= 1.5)) throw InputError("outer radii must grow geometrically by a factor >= 1.5");
  for (std::size_t i = 1; i < b_values.size(); ++i)
    if (std::abs(b_values[i] / b_values[i - 1] - q) > 1e-9 * q) throw InputError("outer radii must be geometric");
  RecurrenceScan scan;
  for (double b : b_values) scan.estimates.push_back(recurrence_probe(M, V, p, a, b, r_start, ens, opts));

  scan.trend = Status::pass;
  for (std::size_t i = 1; i < scan.estimates.size(); ++i) {
    const auto& lo = scan.estimates[i - 1].probability;
    const auto& hi = scan.estimates[i].probability;
    const double se = std::hypot(lo.stderr_, hi.stderr_);
    const Status s = hi.mean > lo.mean ? one_sided_status(hi.mean - lo.mean, se) : Status::fail;
    if (s == Status::fail) scan.trend = Status::fail;
    else if (s == Status::boundary && scan.trend == Status::pass) scan.trend = Status::boundary;
  }

  // y = 1/(1-P) with delta-method errors.
  std::vector<double> y, ys;
  for (const auto& e : scan.estimates) {
    const double miss = 1.0 - e.probability.mean;
    if (miss <= 0.0) {
      scan.classification = RecurrenceClass::recurrent;
      return scan;
    }
    y.push_back(1.0 / miss);
    ys.push_back(e.probability.stderr_ / (miss * miss));
  }
  const double threshold = 1.0 / std::sqrt(q);
  int votes_rec = 0, votes_tr = 0, unclear = 0;
  for (std::size_t i = 2; i < y.size(); ++i) {
    const double d0 = y[i - 1] - y[i - 2];
    const double d1 = y[i] - y[i - 1];
    const double s0 = std::hypot(ys[i - 1], ys[i - 2]);
    const double s1 = std::hypot(ys[i], ys[i - 1]);
    if (d0 <= 2 * s0) {
      ++unclear;
      scan.increment_ratios.push_back(std::nan(""));
      continue;
    }
    const double rho = d1 / d0;
    const double se = std::abs(rho) * std::hypot(s1 / std::max(std::abs(d1), 1e-300), s0 / d0);
    scan.increment_ratios.push_back(rho);
    if (rho - 2 * se > threshold) ++votes_rec;
    else if (rho + 2 * se < threshold) ++votes_tr;
    else ++unclear;
  }
  if (votes_rec > 0 && votes_tr == 0 && unclear == 0) scan.classification = RecurrenceClass::recurrent;
  else if (votes_tr > 0 && votes_rec == 0 && unclear == 0) scan.classification = RecurrenceClass::transient;
  else scan.classification = RecurrenceClass::inconclusive;
  return scan;
}

}  // namespace vharm
