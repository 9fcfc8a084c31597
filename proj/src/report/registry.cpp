#include "vharm/report/registry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "vharm/bochner/bochner.hpp"
#include "vharm/comparison/audit.hpp"
#include "vharm/diffusion/checks.hpp"
#include "vharm/diffusion/recurrence.hpp"
#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/harmonic/growth.hpp"
#include "vharm/harmonic/liouville.hpp"
#include "vharm/harmonic/solver.hpp"
#include "vharm/random.hpp"

namespace vharm {

namespace {

/// Typed access to one [check] section.
class Params {
 public:
  explicit Params(const CheckSpec& spec) : s_(spec.params) {}

  bool has(const std::string& key) const { return s_.find(key) != nullptr; }
  const std::string& str(const std::string& key) const { return s_.require(key).value; }
  std::string str(const std::string& key, std::string fallback) const { return s_.get(key).value_or(fallback); }
  double num(const std::string& key) const { return s_.require_double(key); }
  double num(const std::string& key, double fallback) const { return s_.get_double(key, fallback); }
  std::optional<double> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return num(key);
  }
  std::vector<double> list(const std::string& key) const {
    auto xs = parse_list(s_.require(key));
    if (xs.empty()) throw ValidationError(s_.require(key).line, key, "empty list");
    return xs;
  }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? list(key) : fallback;
  }
  std::size_t count(const std::string& key) const {
    const long long v = s_.require_int(key);
    if (v < 1) throw ValidationError(s_.require(key).line, key, "must be positive");
    return static_cast<std::size_t>(v);
  }
  std::size_t count(const std::string& key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }
  double positive(const std::string& key) const {
    const double v = num(key);
    if (!(v > 0)) throw ValidationError(s_.require(key).line, key, "must be positive");
    return v;
  }
  Point point(const std::string& key, int n) const {
    if (!has(key)) return Point(Vec::Zero(n));
    const auto xs = list(key);
    if (static_cast<int>(xs.size()) != n) throw ValidationError(s_.require(key).line, key, "point dimension mismatch");
    Point x(n);
    for (int i = 0; i < n; ++i) x(i) = xs[static_cast<std::size_t>(i)];
    return x;
  }
  std::vector<Expression> expressions(const std::string& key, int n) const {
    std::vector<Expression> out;
    for (const auto& piece : split_list(str(key), ';')) {
      try {
        out.push_back(Expression::parse(piece, n));
      } catch (const Error& e) {
        throw ValidationError(s_.require(key).line, key, e.what());
      }
    }
    return out;
  }
  [[noreturn]] void reject(const std::string& key, const std::string& msg) const {
    const auto* e = s_.find(key);
    throw ValidationError(e ? e->line : s_.line, key, msg);
  }

 private:
  const KeyValueSection& s_;
};

EnsembleSpec ensemble(const CheckContext& ctx, const Params& p) {
  return EnsembleSpec{p.count("paths"), p.positive("dt"), ctx.seed, ctx.threads};
}

ComparisonInput comparison_input(const CheckContext& ctx, const Params& p) {
  return ComparisonInput::make(ctx.manifold, ctx.drift, ctx.m, ctx.config.kappa, p.point("p", ctx.manifold.dim()),
                               ctx.config.c_p);
}

ManifoldModel target_or_euclidean(const CheckContext& ctx, int components) {
  // A Euclidean target section only fixes the kind; its dimension follows the map.
  if (ctx.target && ctx.target->kind() != ManifoldKind::euclidean) {
    if (ctx.target->dim() != components) throw InputError("map components do not match the target dimension");
    return *ctx.target;
  }
  return ManifoldModel::euclidean(components);
}

SmoothMapSpec map_from(const CheckContext& ctx, const Params& p) {
  const int n = ctx.manifold.dim();
  const auto comps = p.expressions("map", n);
  return SmoothMapSpec::from_expressions(ctx.manifold, target_or_euclidean(ctx, static_cast<int>(comps.size())), comps,
                                         p.str("map"));
}

/// Boundary data g(x) from expressions in the chart coordinates of x.
BoundaryFn boundary_from(const std::vector<Expression>& comps) {
  return [comps](const Point& x) {
    Point y(static_cast<int>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) y(static_cast<int>(i)) = comps[i].evaluate(x);
    return y;
  };
}

std::vector<Point> sample_points(const CheckContext& ctx, std::size_t count, double radius, std::uint64_t stream) {
  RandomStream rng(ctx.seed, stream);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(random_point_in_ball(ctx.manifold, radius, rng));
  return pts;
}

std::optional<ConditionId> parse_condition_or_null(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_condition(text);
}

std::vector<ConditionId> condition_list(const Params& p, const std::string& key) {
  std::vector<ConditionId> out;
  for (const auto& piece : split_list(p.str(key), ',')) {
    try {
      if (auto c = parse_condition_or_null(piece)) out.push_back(*c);
    } catch (const Error& e) {
      p.reject(key, e.what());
    }
  }
  return out;
}

Verdict mc_verdict(const std::string& id, const std::string& anchor, const McRow& row, Claim claim,
                   double tolerance = 0.0) {
  Verdict v = make_verdict(id, fmt::format("{} at t={:g}", row.statistic, row.t), claim, row.estimate.mean, row.bound,
                           row.estimate.stderr_, tolerance, anchor);
  v.status = row.status;
  return v;
}

std::vector<Verdict> mc_verdicts(const std::string& id, const std::string& anchor, const McReport& rep, Claim claim) {
  std::vector<Verdict> out;
  for (const auto& row : rep.rows) out.push_back(mc_verdict(id, anchor, row, claim));
  if (!rep.notes.empty() && !out.empty()) {
    std::string joined;
    for (const auto& n : rep.notes) joined += (joined.empty() ? "" : "; ") + n;
    out.back().reason = joined;
  }
  return out;
}

/// Witness D given as a number, or "audit" to take it from a (B3) audit.
std::optional<double> witness_from(const CheckContext& ctx, const Params& p, std::vector<Verdict>& out,
                                   const std::string& id, const std::string& anchor) {
  const std::string w = p.str("witness");
  if (w != "audit") return p.num("witness");
  const auto in = comparison_input(ctx, p);
  const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)),
                                          p.num("audit_radius", 64.0));
  const auto audit = audit_conditions(in, frame, {ConditionId::B3});
  const auto* b3 = audit.find(ConditionId::B3);
  out.push_back(status_verdict(id, "B3 certified", b3->holds ? Status::pass : Status::fail, b3->witness,
                               static_cast<double>(b3->violations.size()), anchor, b3->note));
  if (!b3->holds) return std::nullopt;
  return b3->witness;
}

// ---- geometry -------------------------------------------------------------

std::vector<Verdict> run_curvature_sampling(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const double tol = p.num("tolerance", 1e-10);
  const auto s = sample_weighted_ricci(ctx.manifold, ctx.drift, ctx.m, p.positive("radius"), p.count("samples"),
                                       ctx.seed, tol);
  Verdict v = make_verdict(c.id, "min Ric_V^m(v,v) >= 0", Claim::at_least, s.min_value, 0.0, 0.0, tol,
                           "weighted-ricci-lower-bound");
  v.reason = fmt::format("{} samples, {} below -tol", s.samples, s.negatives);
  return {v};
}

// ---- comparison -----------------------------------------------------------

std::vector<Verdict> run_classical_comparison(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  if (ctx.m.is_infinite() || ctx.m.value() < ctx.manifold.dim())
    throw InputError("classical comparison needs a finite m >= n");
  const auto in = comparison_input(ctx, p);
  const auto radii = p.list("radii");
  const double rel = p.num("tolerance", 1e-8);
  const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)),
                                          *std::max_element(radii.begin(), radii.end()));
  std::vector<Verdict> out;
  for (double r : radii) {
    const double bound = classical_comparison_bound(ctx.m.value(), ctx.config.kappa, r);
    double worst = -INFINITY;
    for (const auto& dir : frame.directions) worst = std::max(worst, measured_radial_laplacian(in, dir, r));
    out.push_back(make_verdict(c.id, fmt::format("Delta_V r <= (m-1) cot_kappa(r) at r={:g}", r), Claim::at_most, worst,
                               bound, 0.0, rel * std::max(1.0, std::abs(bound)), "classical-laplacian-comparison"));
  }
  return out;
}

std::vector<Verdict> run_laplacian_comparison(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto in = comparison_input(ctx, p);
  const auto radii = p.list("radii");
  const double rel = p.num("tolerance", 1e-8);
  const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)),
                                          *std::max_element(radii.begin(), radii.end()));
  std::vector<Verdict> out;
  for (double r : radii) {
    // Worst margin over the frame directions.
    double lhs = 0.0, rhs = 0.0, margin = INFINITY;
    for (const auto& dir : frame.directions) {
      const double measured = measured_radial_laplacian(in, dir, r);
      const double bound = laplacian_comparison_bound(in, dir, r);
      if (bound - measured < margin) {
        margin = bound - measured;
        lhs = measured;
        rhs = bound;
      }
    }
    out.push_back(make_verdict(c.id, fmt::format("Delta_V r <= comparison bound at r={:g}", r), Claim::at_most, lhs,
                               rhs, 0.0, rel * std::max(1.0, std::abs(rhs)), "global-laplacian-comparison"));
  }
  return out;
}

std::vector<Verdict> run_condition_audit(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto in = comparison_input(ctx, p);
  const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)),
                                          p.positive("max_radius"));
  const auto which = condition_list(p, "conditions");
  const auto expected_fail = p.has("expect_fail") ? condition_list(p, "expect_fail") : std::vector<ConditionId>{};
  AuditOptions opts;
  opts.stabilization = p.num("stabilization", opts.stabilization);
  const auto audit = audit_conditions(in, frame, which, opts);
  std::vector<Verdict> out;
  for (const auto& rep : audit.reports) {
    const bool want = std::find(expected_fail.begin(), expected_fail.end(), rep.id) == expected_fail.end();
    const std::string label = fmt::format("{} {}", to_string(rep.id), want ? "holds" : "fails");
    std::string reason = rep.note;
    if (rep.id <= ConditionId::A3) reason += rep.starred_holds ? " [starred variant holds]" : "";
    out.push_back(status_verdict(c.id, label, rep.holds == want ? Status::pass : Status::fail, rep.witness,
                                 static_cast<double>(rep.violations.size()), "growth-conditions-A-B", reason));
  }
  return out;
}

std::vector<Verdict> run_implication_audit(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto in = comparison_input(ctx, p);
  const double R = p.positive("max_radius");
  const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)), R);
  const auto audit =
      audit_conditions(in, frame, {ConditionId::A1, ConditionId::A2, ConditionId::A3, ConditionId::B1,
                                   ConditionId::B2, ConditionId::B3});
  const auto ric = sample_weighted_ricci(ctx.manifold, ctx.drift, ctx.m, p.num("curvature_radius", R),
                                         p.count("curvature_samples", 1000), ctx.seed);
  const bool nonneg = ric.negatives == 0;
  std::vector<Verdict> out;
  out.push_back(status_verdict(c.id, "Ric_V^m >= 0 on samples", nonneg ? Status::pass : Status::inconclusive,
                               ric.min_value, 0.0, "a-implies-b",
                               nonneg ? "" : "curvature hypothesis not met; implication not tested"));
  const ConditionId pairs[3][2] = {{ConditionId::A1, ConditionId::B1},
                                   {ConditionId::A2, ConditionId::B2},
                                   {ConditionId::A3, ConditionId::B3}};
  for (const auto& pr : pairs) {
    const auto* a = audit.find(pr[0]);
    const auto* b = audit.find(pr[1]);
    if (!a->holds) continue;
    out.push_back(status_verdict(c.id, fmt::format("{} holds => {} holds", to_string(pr[0]), to_string(pr[1])),
                                 b->holds ? Status::pass : (nonneg ? Status::fail : Status::inconclusive), b->witness,
                                 static_cast<double>(b->violations.size()), "a-implies-b",
                                 fmt::format("{}; witness D={:.6g}", a->note, b->witness)));
  }
  const auto ce = implication_counterexamples(audit, nonneg);
  std::string joined;
  for (const auto& s : ce) joined += (joined.empty() ? "" : "; ") + s;
  out.push_back(make_verdict(c.id, "counterexamples", Claim::equal, static_cast<double>(ce.size()), 0.0, 0.0, 0.0,
                             "a-implies-b"));
  out.back().reason = joined;
  return out;
}

// ---- diffusion ------------------------------------------------------------

std::vector<Verdict> run_ito(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const auto f = ScalarField::from_expression(p.expressions("function", n).at(0));
  const auto row =
      ito_martingale_check(ctx.manifold, ctx.drift, p.point("x0", n), p.positive("t"), f, ensemble(ctx, p));
  return {mc_verdict(c.id, "ito-formula", row, Claim::equal)};
}

std::vector<Verdict> run_generator(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const auto f = ScalarField::from_expression(p.expressions("function", n).at(0));
  const double dt = p.positive("dt");
  const auto row = generator_check(ctx.manifold, ctx.drift, p.point("x", n), f, dt, p.count("trials"), ctx.seed);
  return {mc_verdict(c.id, "diffusion-generator", row, Claim::equal, 10.0 * dt * dt)};
}

std::vector<Verdict> run_weak_order(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const auto f = p.expressions("function", n).at(0);
  const EnsembleSpec ens{p.count("paths"), p.positive("dt0"), ctx.seed, ctx.threads};
  const auto res = weak_order_check(ctx.manifold, ctx.drift, p.point("x0", n), p.positive("t"),
                                    [&](const Point& x) { return f.evaluate(x); }, ens.dt,
                                    static_cast<int>(p.count("levels")), ens);
  std::vector<Verdict> out;
  const double lo = p.num("ratio_min", 1.5), hi = p.num("ratio_max", 3.0);
  for (std::size_t i = 0; i < res.ratios.size(); ++i) {
    const double r = res.ratios[i];
    const Status s = (r >= lo && r <= hi) ? Status::pass : res.status == Status::low_power ? Status::low_power
                                                                                             : Status::fail;
    out.push_back(status_verdict(c.id, fmt::format("weak error halving ratio {} in [{:g},{:g}]", i, lo, hi), s, r,
                                 r < lo ? lo : hi, "euler-weak-order",
                                 fmt::format("dt={:g}; overall {}", res.dts[i], to_string(res.status))));
  }
  return out;
}

std::vector<Verdict> run_kendall(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const auto rep = kendall_check(ctx.manifold, ctx.drift, p.point("p", n), p.point("x0", n), p.list("t_grid"),
                                 ensemble(ctx, p));
  std::vector<Verdict> out;
  for (const auto& row : rep.as_report(ctx.config.experiment_id).rows) {
    const bool qv = row.statistic == "beta_quadratic_variation";
    out.push_back(mc_verdict(c.id, "kendall-radial-decomposition", row, Claim::equal, qv ? 0.05 * row.t : 0.0));
  }
  return out;
}

std::vector<Verdict> run_moment_bound(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  std::vector<Verdict> out;
  const auto D = witness_from(ctx, p, out, c.id, "squared-distance-moment-bound");
  if (!D) return out;
  const auto rep = moment_bound_check(ctx.manifold, ctx.drift, p.point("p", n), p.point("x0", n), D, p.list("t_grid"),
                                      ensemble(ctx, p), p.num("exit_radius", INFINITY));
  for (auto& v : mc_verdicts(c.id, "squared-distance-moment-bound", rep, Claim::at_most)) out.push_back(v);
  return out;
}

std::vector<Verdict> run_lyapunov(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  ConditionId cond;
  try {
    cond = parse_condition(p.str("condition"));
  } catch (const Error& e) {
    p.reject("condition", e.what());
  }
  std::vector<Verdict> out;
  std::optional<double> D;
  if (p.str("witness") == "audit") {
    const auto in = comparison_input(ctx, p);
    const auto frame = RadialFrame::uniform(in.manifold, in.base, static_cast<int>(p.count("directions", 8)),
                                            p.num("audit_radius", 64.0));
    const auto audit = audit_conditions(in, frame, {cond});
    const auto* rep = audit.find(cond);
    out.push_back(status_verdict(c.id, to_string(cond) + " certified", rep->holds ? Status::pass : Status::fail,
                                 rep->witness, static_cast<double>(rep->violations.size()), "lyapunov-growth-bounds",
                                 rep->note));
    if (!rep->holds) return out;
    D = rep->witness;
  } else {
    D = p.num("witness");
  }
  const auto rep = lyapunov_check(ctx.manifold, ctx.drift, p.point("p", n), p.point("x0", n), D, cond,
                                  p.positive("t"), ensemble(ctx, p), p.num("exit_radius", INFINITY));
  for (auto& v : mc_verdicts(c.id, "lyapunov-growth-bounds", rep, Claim::at_most)) out.push_back(v);
  return out;
}

std::vector<Verdict> run_conservativeness(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  std::vector<Verdict> out;
  const auto D = witness_from(ctx, p, out, c.id, "conservativeness");
  if (!D) return out;
  const auto rep = conservativeness_check(ctx.manifold, ctx.drift, p.point("p", n), p.point("x0", n), D,
                                          p.list("radii"), p.positive("t"), ensemble(ctx, p));
  for (auto& v : mc_verdicts(c.id, "conservativeness", rep, Claim::at_most)) out.push_back(v);
  return out;
}

/// P(hit a before b) from r for the flat Laplacian, when it is known.
std::optional<double> flat_hitting_probability(int n, double a, double b, double r) {
  if (n == 2) return std::log(b / r) / std::log(b / a);
  const double k = n - 2.0;
  return (std::pow(r, -k) - std::pow(b, -k)) / (std::pow(a, -k) - std::pow(b, -k));
}

std::vector<Verdict> run_recurrence(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const double a = p.positive("a"), r0 = p.positive("r_start");
  HittingOptions hopts;
  hopts.accuracy = p.num("accuracy", hopts.accuracy);
  const auto scan = recurrence_scan(ctx.manifold, ctx.drift, p.point("p", n), a, r0, p.list("b_values"),
                                    ensemble(ctx, p), hopts);
  const std::string anchor = "recurrence-hitting-scan";
  std::vector<Verdict> out;
  const bool flat = ctx.manifold.kind() == ManifoldKind::euclidean && ctx.drift.identically_zero();
  for (const auto& e : scan.estimates) {
    if (flat) {
      Verdict v = make_verdict(c.id, fmt::format("P(hit {:g} before {:g}) = flat formula", a, e.b), Claim::equal,
                               e.probability.mean, *flat_hitting_probability(n, a, e.b, r0), e.probability.stderr_,
                               0.0, anchor);
      if (e.status == Status::low_power) v.status = Status::low_power;
      out.push_back(v);
    } else {
      out.push_back(status_verdict(c.id, fmt::format("P(hit {:g} before {:g})", a, e.b), e.status,
                                   e.probability.mean, e.probability.stderr_, anchor,
                                   fmt::format("censored {:.3g}", e.censored_fraction)));
    }
  }
  const double first = scan.estimates.front().probability.mean, last = scan.estimates.back().probability.mean;
  out.push_back(status_verdict(c.id, "P strictly increasing in b", scan.trend, first, last, anchor));
  if (p.has("expect")) {
    const std::string want = p.str("expect");
    if (want != "recurrent" && want != "transient") p.reject("expect", "expect must be recurrent or transient");
    const std::string got = to_string(scan.classification);
    const Status s = scan.classification == RecurrenceClass::inconclusive ? Status::inconclusive
                     : got == want                                       ? Status::pass
                                                                         : Status::fail;
    out.push_back(status_verdict(c.id, "classified " + want, s, scan.increment_ratios.empty() ? 0.0 : scan.increment_ratios.back(),
                                 0.0, anchor, "classification " + got));
  }
  return out;
}

// ---- bochner --------------------------------------------------------------

std::vector<Verdict> run_bochner_identity(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto u = map_from(ctx, p);
  const double tol = p.num("tolerance", 1e-3);
  double worst = 0.0;
  for (const auto& x : sample_points(ctx, p.count("points"), p.positive("radius"), 1))
    worst = std::max(worst, std::abs(bochner_residual(u, ctx.drift, x)));
  return {make_verdict(c.id, "max |Bochner residual|", Claim::at_most, worst, tol, 0.0, 0.0, "bochner-identity")};
}

Verdict bochner_report_verdict(const std::string& id, const std::string& label, const BochnerReport& rep,
                               const std::string& anchor) {
  const auto it = std::min_element(rep.rows.begin(), rep.rows.end(),
                                   [](const BochnerRow& a, const BochnerRow& b) { return a.margin < b.margin; });
  Verdict v = status_verdict(id, label, rep.pass() ? Status::pass : Status::fail, it->lhs, it->rhs, anchor,
                             fmt::format("{} points", rep.rows.size()));
  v.margin = rep.min_margin();
  v.tolerance = 1e-4;
  return v;
}

std::vector<Verdict> run_bochner_lower_bound(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto rep = bochner_lower_bound_check(map_from(ctx, p), ctx.drift, ctx.m,
                                             sample_points(ctx, p.count("points"), p.positive("radius"), 2));
  return {bochner_report_verdict(c.id, "Delta_V |du|^2 >= coefficient |du(V)|^2", rep, "bochner-inequality")};
}

std::vector<Verdict> run_scalar_bochner(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  const auto f = ScalarField::from_expression(p.expressions("function", n).at(0));
  const double tol = p.num("tolerance", 1e-3);
  const bool first = ctx.m.is_infinite() || ctx.m.value() <= 0 || ctx.m.value() >= n;
  const bool second = ctx.m.is_minus_infinity() || ctx.m.is_plus_infinity() ||
                      (!ctx.m.is_infinite() && (ctx.m.value() < 0 || ctx.m.value() > n));
  double worst_res = 0.0, margin1 = INFINITY, margin2 = INFINITY;
  double lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
  for (const auto& x : sample_points(ctx, p.count("points"), p.positive("radius"), 3)) {
    const auto t = scalar_bochner(ctx.manifold, ctx.drift, f, ctx.m, x);
    worst_res = std::max(worst_res, std::abs(t.residual));
    if (first) {
      const double r = scalar_bochner_rhs(t, n, ctx.m);
      if (t.lhs - r < margin1) margin1 = t.lhs - r, lhs1 = t.lhs, rhs1 = r;
    }
    if (second) {
      const double r = scalar_bochner_rhs_negative_m(t, n, ctx.m);
      if (t.lhs - r < margin2) margin2 = t.lhs - r, lhs2 = t.lhs, rhs2 = r;
    }
  }
  const std::string anchor = "scalar-bochner-inequality";
  std::vector<Verdict> out{make_verdict(c.id, "max |scalar Bochner residual|", Claim::at_most, worst_res, tol, 0.0,
                                        0.0, anchor)};
  if (first) out.push_back(make_verdict(c.id, "inequality with (Delta_V u)^2/n", Claim::at_least, lhs1, rhs1, 0.0, tol, anchor));
  if (second) out.push_back(make_verdict(c.id, "inequality with (Delta_V u)^2/m", Claim::at_least, lhs2, rhs2, 0.0, tol, anchor));
  return out;
}

std::vector<Verdict> run_hilbert_trace(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const std::size_t trials = p.count("trials");
  const int max_n = static_cast<int>(p.count("max_dim", 5));
  RandomStream rng(ctx.seed, 4);
  std::size_t violations = 0;
  double worst = INFINITY;
  for (std::size_t k = 0; k < trials; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform() * max_n);
    const int d = 1 + static_cast<int>(rng.uniform() * 4);
    HilbertArray h(static_cast<std::size_t>(n), std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Eigen::VectorXd v(d);
        for (int l = 0; l < d; ++l) v(l) = rng.normal();
        h[i][j] = h[j][i] = v;
      }
    const auto r = hilbert_trace_check(h);
    if (!r.pass) ++violations;
    worst = std::min(worst, r.lhs - r.rhs);
  }
  Verdict v = make_verdict(c.id, "violations of sum |h_ij|^2 >= |trace|^2/n", Claim::equal,
                           static_cast<double>(violations), 0.0, 0.0, 0.0, "hilbert-cauchy-schwarz");
  v.reason = fmt::format("{} trials, smallest gap {:.3g}", trials, worst);
  return {v};
}

std::vector<Verdict> run_distance_laplacian(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto u = map_from(ctx, p);
  const auto rep = distance_laplacian_check(u, ctx.drift, p.point("o", u.target().dim()),
                                            sample_points(ctx, p.count("points"), p.positive("radius"), 5));
  return {bochner_report_verdict(c.id, "Delta_V d^2(u,o) >= 2|du|^2", rep, "distance-laplacian-harmonic-map")};
}

// ---- harmonic -------------------------------------------------------------

SolverOptions solver_options(const Params& p) {
  SolverOptions o;
  o.tol = p.num("tol", o.tol);
  o.eta = p.opt("eta");
  if (p.has("max_sweeps")) o.max_sweeps = static_cast<int>(p.count("max_sweeps"));
  return o;
}

ManifoldModel harmonic_target(const CheckContext& ctx, int components) { return target_or_euclidean(ctx, components); }

SolveResult solve_from(const CheckContext& ctx, const Params& p) {
  const int n = ctx.manifold.dim();
  const auto comps = p.expressions("boundary", n);
  return solve(ctx.manifold, p.point("center", n), p.positive("radius"), p.positive("h"), boundary_from(comps),
               harmonic_target(ctx, static_cast<int>(comps.size())), ctx.drift, solver_options(p));
}

std::vector<Verdict> run_solver_convergence(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto res = solve_from(ctx, p);
  const std::string anchor = "v-harmonic-solver";
  std::vector<Verdict> out;
  out.push_back(make_verdict(c.id, "tension residual <= tol", Claim::at_most, res.residual, solver_options(p).tol, 0.0,
                             0.0, anchor));
  out.back().reason = fmt::format("{} sweeps, {} halvings", res.sweeps, res.halvings);
  if (!res.energy_history.empty()) {
    out.push_back(status_verdict(c.id, "energy nonincreasing", res.energy_nonincreasing() ? Status::pass : Status::fail,
                                 res.energy_history.back(), res.energy_history.front(), anchor));
  }
  if (p.has("exact")) {
    const auto exact = p.expressions("exact", ctx.manifold.dim());
    const auto& g = res.grid;
    double err = 0.0;
    for (std::size_t node : g.interior_nodes()) {
      const Point x = g.position(node);
      const Point& v = g.value(node);
      for (int k = 0; k < v.size(); ++k)
        err = std::max(err, std::abs(v(k) - exact.at(static_cast<std::size_t>(k)).evaluate(x)));
    }
    out.push_back(make_verdict(c.id, "max nodal error against the exact solution", Claim::at_most, err,
                               p.num("error_tol", 1e-3), 0.0, 0.0, anchor));
  }
  return out;
}

/// A map view from either `map` (analytic) or `boundary`/`radius`/`h` (solved).
MapView view_from(const CheckContext& ctx, const Params& p) {
  if (p.has("map")) {
    return MapView::from_map(map_from(ctx, p), p.point("center", ctx.manifold.dim()),
                             static_cast<int>(p.count("resolution", 16)));
  }
  auto res = solve_from(ctx, p);
  return MapView::from_grid(std::make_shared<const MapGrid>(std::move(res.grid)));
}

std::vector<Verdict> run_gradient_estimate(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto view = view_from(ctx, p);
  const Point o = p.point("o", view.target.dim());
  std::vector<GradientEstimateRow> rows;
  for (double a : p.list("radii")) rows.push_back(gradient_estimate(view, o, a));
  const auto rep = gradient_estimate_check(rows);
  std::vector<Verdict> out;
  for (const auto& r : rep.rows) {
    out.push_back(make_verdict(c.id, fmt::format("sup|du|^2/(m_u(2a)+1)^2 bounded at a={:g}", r.a), Claim::at_most,
                               r.rho, 1.2 * rep.fitted_constant, 0.0, 0.0, "linear-growth-gradient-estimate"));
  }
  out.push_back(status_verdict(c.id, "fitted constant", rep.status, rep.fitted_constant, 0.0,
                               "linear-growth-gradient-estimate"));
  return out;
}

std::vector<Verdict> run_growth_classification(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const auto view = view_from(ctx, p);
  const auto prof = classify_growth(view, p.point("o", view.target.dim()), p.list("radii"));
  const std::string want = p.str("expect");
  const std::string got = to_string(prof.growth_class);
  bool ok = got == want;
  if (want == "G1" || want == "G2" || want == "G3") ok = prof.satisfies(want[1] - '0');
  else if (want != "bounded" && want != "superlinear") p.reject("expect", "expect must be bounded, G1, G2, G3 or superlinear");
  return {status_verdict(c.id, "growth class " + want, ok ? Status::pass : Status::fail, prof.exponent, 0.0,
                         "growth-conditions-G", "classified " + got)};
}

std::vector<Verdict> run_gauge_convexity(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  if (!ctx.target || ctx.target->kind() != ManifoldKind::sphere) throw InputError("gauge check needs a sphere target");
  const ConvexGauge gauge(ctx.target->kappa(), p.point("o", ctx.target->dim()));
  const auto fit = gauge.fit_convexity(p.positive("radius"), p.count("samples"), ctx.seed);
  Verdict v = status_verdict(c.id, "phi'' >= C phi'^2 on the regular ball", fit.status, fit.fitted_constant, 0.0,
                             "convex-gauge", fmt::format("{} samples, {} violations", fit.samples, fit.violations));
  return {v};
}

std::vector<Verdict> run_submartingale_phi(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  if (!ctx.target || ctx.target->kind() != ManifoldKind::sphere)
    throw InputError("submartingale check needs a sphere target");
  const auto res = solve_from(ctx, p);
  const ConvexGauge gauge(ctx.target->kappa(), Point(Vec::Zero(ctx.target->dim())));
  SubmartingaleParams sp;
  sp.x0 = p.point("x0", ctx.manifold.dim());
  sp.t_grid = p.list("t_grid", sp.t_grid);
  sp.ens = ensemble(ctx, p);
  sp.stop_radius = p.opt("stop_radius");
  const std::string anchor = "gauge-submartingale";
  auto verdicts_of = [&](const SubmartingaleReport& rep, const std::string& prefix) {
    std::vector<Verdict> out;
    Verdict v = make_verdict(c.id, prefix + "min Delta_V phi(u) >= -tol", Claim::at_least, rep.min_laplacian, 0.0, 0.0,
                             sp.pointwise_tol, anchor);
    v.reason = fmt::format("{} of {} nodes violate", rep.violations, rep.interior_nodes);
    out.push_back(v);
    for (const auto& row : rep.rows)
      if (row.statistic == "E[phi(u)] increment") out.push_back(mc_verdict(c.id, anchor, row, Claim::at_least));
    for (std::size_t i = 1; i < out.size(); ++i) out[i].label = prefix + out[i].label;
    return out;
  };
  auto out = verdicts_of(submartingale_phi_check(res.grid, ctx.drift, gauge, sp), "");
  if (p.has("negative_control")) {
    MapGrid bent = res.grid;
    RandomStream rng(ctx.seed, 6);
    const double amp = p.positive("negative_control");
    for (std::size_t node : bent.interior_nodes()) {
      Vec noise(ctx.target->dim());
      for (int k = 0; k < noise.size(); ++k) noise(k) = rng.normal();
      bent.value(node) += amp * noise;
    }
    const auto neg = submartingale_phi_check(bent, ctx.drift, gauge, sp);
    out.push_back(status_verdict(c.id, "perturbed control is rejected",
                                 neg.overall() == Status::fail ? Status::pass : Status::fail, neg.min_laplacian,
                                 -sp.pointwise_tol, anchor,
                                 fmt::format("{} of {} nodes violate", neg.violations, neg.interior_nodes)));
  }
  return out;
}

std::vector<Verdict> lower_bound_rows(const CheckContext& ctx, const CheckSpec& c, const std::string& statistic,
                                      const std::string& anchor) {
  const Params p(c);
  const auto view = view_from(ctx, p);
  const int n = ctx.manifold.dim();
  const auto rep = liouville_lower_bound_check(view, ctx.drift, p.point("o", view.target.dim()), p.point("x0", n),
                                               p.list("t_grid"), ensemble(ctx, p), p.opt("stop_radius"));
  std::vector<Verdict> out;
  for (const auto& row : rep.rows)
    if (row.statistic == statistic) out.push_back(mc_verdict(c.id, anchor, row, Claim::at_least));
  if (p.has("expect_equal")) {
    // Equality case: the bound is attained (e.g. linear maps with V = 0 from the center).
    for (const auto& row : rep.rows) {
      if (row.statistic != statistic) continue;
      out.push_back(make_verdict(c.id, fmt::format("{} attained at t={:g}", statistic, row.t), Claim::equal,
                                 row.estimate.mean, row.bound, row.estimate.stderr_, 0.0, anchor));
    }
  }
  return out;
}

std::vector<Verdict> run_liouville_lower_bound(const CheckContext& ctx, const CheckSpec& c) {
  return lower_bound_rows(ctx, c, "growth_lower_bound", "growth-lower-bound");
}

std::vector<Verdict> run_energy_submartingale(const CheckContext& ctx, const CheckSpec& c) {
  return lower_bound_rows(ctx, c, "energy_submartingale", "energy-density-submartingale");
}

std::function<Point(const Vec&)> pattern_from(const Params& p, int n) {
  const auto comps = p.expressions("pattern", n);
  return [comps](const Vec& dir) {
    Point y(static_cast<int>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) y(static_cast<int>(i)) = comps[i].evaluate(dir);
    return y;
  };
}

std::vector<Verdict> run_decay_demo(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  DecaySpec spec;
  spec.domain = ctx.manifold;
  spec.V = ctx.drift;
  spec.pattern = pattern_from(p, n);
  spec.target = harmonic_target(ctx, static_cast<int>(p.expressions("pattern", n).size()));
  spec.radii = p.list("radii");
  spec.nodes_per_radius = static_cast<int>(p.count("nodes_per_radius", 32));
  spec.solver = solver_options(p);
  spec.threads = ctx.threads;
  const auto rep = liouville_decay_demo(spec);
  const std::string anchor = "liouville-decay";
  std::vector<Verdict> out;
  out.push_back(status_verdict(c.id, "|du|^2 at the center nonincreasing in a",
                               rep.nonincreasing ? Status::pass : Status::fail, rep.rows.front().energy_center,
                               rep.rows.back().energy_center, anchor));
  Verdict slope = make_verdict(c.id, "log-log energy slope <= max_slope", Claim::at_most, rep.energy_fit.slope,
                               p.num("max_slope", -1.0), rep.energy_fit.slope_stderr, 0.0, anchor);
  slope.reason = fmt::format("gradient slope {:.4g}; demo {}", rep.gradient_fit.slope, to_string(rep.status));
  out.push_back(slope);
  return out;
}

std::vector<Verdict> run_recurrence_bridge(const CheckContext& ctx, const CheckSpec& c) {
  const Params p(c);
  const int n = ctx.manifold.dim();
  BridgeSpec spec;
  spec.manifold = ctx.manifold;
  spec.V = ctx.drift;
  spec.a = p.positive("a");
  spec.r_start = p.positive("r_start");
  spec.b_values = p.list("b_values");
  spec.ens = ensemble(ctx, p);
  spec.radii = p.list("radii");
  spec.inner_radius = p.num("inner_radius", spec.inner_radius);
  const std::string family = p.str("family", "annulus_profile");
  if (family == "ball_solver") {
    spec.family = OscillationFamily::ball_solver;
    spec.pattern = pattern_from(p, n);
    spec.target = harmonic_target(ctx, static_cast<int>(p.expressions("pattern", n).size()));
    spec.nodes_per_radius = static_cast<int>(p.count("nodes_per_radius", 16));
  } else if (family != "annulus_profile") {
    p.reject("family", "family must be annulus_profile or ball_solver");
  }
  const auto rep = recurrence_liouville_bridge(spec);
  return {status_verdict(c.id, "recurrence class agrees with oscillation decay", rep.status,
                         rep.increment_ratios.empty() ? 0.0 : rep.increment_ratios.back(),
                         std::pow(spec.radii[1] / spec.radii[0], -0.5), "recurrence-liouville-bridge", rep.summary)};
}

std::vector<CheckInfo> build_registry() {
  const std::vector<std::string> mc{"paths", "dt"};
  auto keys = [](std::initializer_list<std::vector<std::string>> groups) {
    std::vector<std::string> out;
    for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    return out;
  };
  const std::vector<std::string> solved{"boundary", "radius", "h", "center", "tol", "eta", "max_sweeps"};
  std::vector<CheckInfo> r{
      {"curvature_sampling", "geometry", "weighted-ricci-lower-bound",
       "Samples Ric_V^m(v,v) on a geodesic ball and checks nonnegativity", {"radius", "samples"}, {"tolerance"},
       run_curvature_sampling},
      {"classical_comparison", "comparison", "classical-laplacian-comparison",
       "Measured Delta_V r against (m-1) cot_kappa(r) for m >= n", {"radii"}, {"p", "directions", "tolerance"},
       run_classical_comparison},
      {"laplacian_comparison", "comparison", "global-laplacian-comparison",
       "Measured Delta_V r against the generalized comparison bound", {"radii"}, {"p", "directions", "tolerance"},
       run_laplacian_comparison},
      {"condition_audit", "comparison", "growth-conditions-A-B",
       "Audits the drift growth conditions (A1)-(A3) and (B1)-(B3) with witnesses", {"conditions", "max_radius"},
       {"p", "directions", "expect_fail", "stabilization"}, run_condition_audit},
      {"implication_audit", "comparison", "a-implies-b",
       "Checks that each passing (Ai) has a passing (Bi) when Ric_V^m >= 0", {"max_radius"},
       {"p", "directions", "curvature_radius", "curvature_samples"}, run_implication_audit},
      {"ito_martingale", "diffusion", "ito-formula", "Mean of the Ito residual of f along the diffusion",
       keys({{"function", "t"}, mc}), {"x0"}, run_ito},
      {"generator", "diffusion", "diffusion-generator", "Single-step increments against Delta_V f",
       {"function", "x", "dt", "trials"}, {}, run_generator},
      {"weak_order", "diffusion", "euler-weak-order", "Weak error halving ratios of the Euler scheme",
       {"function", "t", "dt0", "levels", "paths"}, {"x0", "ratio_min", "ratio_max"}, run_weak_order},
      {"kendall", "diffusion", "kendall-radial-decomposition",
       "Reconstructed radial Brownian motion: mean 0 and quadratic variation t", keys({{"t_grid"}, mc}), {"p", "x0"},
       run_kendall},
      {"moment_bound", "diffusion", "squared-distance-moment-bound",
       "E[r^2] and E[r^4] against the Gronwall envelopes with a (B3) witness", keys({{"t_grid", "witness"}, mc}),
       {"p", "x0", "exit_radius", "audit_radius", "directions"}, run_moment_bound},
      {"lyapunov", "diffusion", "lyapunov-growth-bounds", "Expectation bounds implied by (B1), (B2) or (B3)",
       keys({{"condition", "t", "witness"}, mc}), {"p", "x0", "exit_radius", "audit_radius", "directions"},
       run_lyapunov},
      {"conservativeness", "diffusion", "conservativeness", "Exit fractions of growing balls against D(t)/R^2",
       keys({{"radii", "t", "witness"}, mc}), {"p", "x0", "audit_radius", "directions"}, run_conservativeness},
      {"recurrence", "diffusion", "recurrence-hitting-scan",
       "Annulus hitting probabilities over growing outer radii", keys({{"a", "r_start", "b_values"}, mc}),
       {"p", "expect", "accuracy"}, run_recurrence},
      {"bochner_identity", "bochner", "bochner-identity", "Residual of the Bochner formula for a map",
       {"map", "points", "radius"}, {"tolerance"}, run_bochner_identity},
      {"bochner_lower_bound", "bochner", "bochner-inequality",
       "Delta_V |du|^2 >= 2m/(n(m-n)) |du(V)|^2 for V-harmonic maps", {"map", "points", "radius"}, {},
       run_bochner_lower_bound},
      {"scalar_bochner", "bochner", "scalar-bochner-inequality", "Scalar Bochner formula and its inequalities",
       {"function", "points", "radius"}, {"tolerance"}, run_scalar_bochner},
      {"hilbert_trace", "bochner", "hilbert-cauchy-schwarz",
       "Random property test of sum |h_ij|^2 >= |sum h_ii|^2 / n", {"trials"}, {"max_dim"}, run_hilbert_trace},
      {"distance_laplacian", "bochner", "distance-laplacian-harmonic-map",
       "Delta_V d^2(u, o) >= 2|du|^2 for maps into Hadamard targets", {"map", "points", "radius"}, {"o"},
       run_distance_laplacian},
      {"solver_convergence", "harmonic", "v-harmonic-solver",
       "Discrete V-harmonic Dirichlet problem: residual, energy and exact error", {"boundary", "radius", "h"},
       {"center", "tol", "eta", "max_sweeps", "exact", "error_tol"}, run_solver_convergence},
      {"gradient_estimate", "harmonic", "linear-growth-gradient-estimate",
       "Boundedness of sup|du|^2/(m_u(2a)+1)^2 across radii", {"radii"},
       keys({{"map", "resolution", "o"}, solved}), run_gradient_estimate},
      {"growth_classification", "harmonic", "growth-conditions-G", "Growth class of m_u(a)", {"radii", "expect"},
       keys({{"map", "resolution", "o"}, solved}), run_growth_classification},
      {"gauge_convexity", "harmonic", "convex-gauge", "Strong convexity of the gauge on a regular ball",
       {"radius", "samples"}, {"o"}, run_gauge_convexity},
      {"submartingale_phi", "harmonic", "gauge-submartingale",
       "phi(u) is a Delta_V-subharmonic function and a submartingale along the diffusion",
       keys({{"boundary", "radius", "h"}, mc}),
       {"center", "tol", "eta", "max_sweeps", "x0", "t_grid", "stop_radius", "negative_control"},
       run_submartingale_phi},
      {"liouville_lower_bound", "harmonic", "growth-lower-bound",
       "E[d^2(u(X_t), o)] >= 2t|du|^2(x0) for maps into Hadamard targets", keys({{"t_grid"}, mc}),
       keys({{"map", "resolution", "o", "x0", "stop_radius", "expect_equal"}, solved}), run_liouville_lower_bound},
      {"energy_submartingale", "harmonic", "energy-density-submartingale",
       "E[|du|^2(X_t)] >= |du|^2(x0) along the diffusion", keys({{"t_grid"}, mc}),
       keys({{"map", "resolution", "o", "x0", "stop_radius", "expect_equal"}, solved}), run_energy_submartingale},
      {"decay_demo", "harmonic", "liouville-decay",
       "Energy density at the center of solved maps on growing balls", {"pattern", "radii"},
       {"nodes_per_radius", "tol", "eta", "max_sweeps", "max_slope"}, run_decay_demo},
      {"recurrence_bridge", "harmonic", "recurrence-liouville-bridge",
       "Recurrence scan against oscillation decay of bounded V-harmonic families",
       keys({{"a", "r_start", "b_values", "radii"}, mc}),
       {"inner_radius", "family", "pattern", "nodes_per_radius"}, run_recurrence_bridge},
  };
  std::sort(r.begin(), r.end(), [](const CheckInfo& a, const CheckInfo& b) { return a.id < b.id; });
  return r;
}

}  // namespace

const std::vector<CheckInfo>& registry() {
  static const std::vector<CheckInfo> r = build_registry();
  return r;
}

const CheckInfo* find_check(std::string_view id) {
  for (const auto& c : registry())
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<const CheckInfo*> list_checks(std::string_view module) {
  std::vector<const CheckInfo*> out;
  for (const auto& c : registry())
    if (module.empty() || c.module == module) out.push_back(&c);
  return out;
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace vharm
