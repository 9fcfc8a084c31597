#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vharm/comparison/audit.hpp"
#include "vharm/diffusion/engine.hpp"
#include "vharm/geometry/scalar_field.hpp"

namespace vharm {

/// One Monte-Carlo statistic against a bound or reference value.
struct McRow {
  double t = 0.0;
  std::string statistic;
  McEstimate estimate;
  double bound = 0.0;
  Status status = Status::inconclusive;
};

struct McReport {
  std::string experiment_id;
  std::vector<McRow> rows;
  std::vector<std::string> notes;

  /// fail if any row fails, else boundary if any row is boundary, else pass.
  Status overall() const;
};

/// CSV columns: experiment_id,t,statistic,mean,stderr,bound,verdict.
void write_mc_csv(std::ostream& out, const std::vector<McReport>& reports, bool header = true);

/// m^f_k = f(X_k) - f(X_0) - sum_{j<k} Delta_V f(X_j) dt_j on the path grid.
std::vector<double> ito_residual(const ManifoldModel& manifold, const DriftField& V, const DiffusionPath& path,
                                 const ScalarField& f);

/// Batch mean of the Ito residual at time t; the martingale property makes it 0.
McRow ito_martingale_check(const ManifoldModel& manifold, const DriftField& V, const Point& x0, double t,
                           const ScalarField& f, const EnsembleSpec& ens);

/// Mean quadratic variation of the residual against 2 int_0^t |grad f|^2 ds.
struct QuadraticVariationResult {
  McEstimate quadratic_variation;
  McEstimate predicted;
  double relative_error = 0.0;
};
QuadraticVariationResult ito_quadratic_variation(const ManifoldModel& manifold, const DriftField& V,
                                                 const Point& x0, double t, const ScalarField& f,
                                                 const EnsembleSpec& ens);

/// (E[f(X_dt)] - f(x))/dt against Delta_V f(x) from single steps.
McRow generator_check(const ManifoldModel& manifold, const DriftField& V, const Point& x, const ScalarField& f,
                      double dt, std::size_t trials, std::uint64_t seed);

/// Weak error of E[f(X_t)] across dt-halvings, with coupled Brownian increments.
struct WeakOrderResult {
  std::vector<double> dts;
  std::vector<McEstimate> means;
  std::vector<McEstimate> differences;  // level l minus level l+1
  std::vector<double> ratios;           // |d_l| / |d_{l+1}|
  Status status = Status::inconclusive;
};
WeakOrderResult weak_order_check(const ManifoldModel& manifold, const DriftField& V, const Point& x0, double t,
                                 const std::function<double(const Point&)>& f, double dt0, int levels,
                                 const EnsembleSpec& ens);

/// Radial decomposition check: beta_t = (r(X_t) - r(X_0) - int Delta_V r ds)/sqrt(2)
/// must have mean 0 and quadratic variation t (within 5%).
struct KendallRow {
  double t = 0.0;
  McEstimate beta;
  McEstimate quadratic_variation;
  McEstimate radius;
  McEstimate drift_integral;
  Status mean_status = Status::inconclusive;
  Status qv_status = Status::inconclusive;
};
struct KendallReport {
  std::vector<KendallRow> rows;
  double max_local_time = 0.0;
  Status overall() const;
  McReport as_report(const std::string& experiment_id) const;
};
KendallReport kendall_check(const ManifoldModel& manifold, const DriftField& V, const Point& p, const Point& x0,
                            const std::vector<double>& t_grid, const EnsembleSpec& ens);

/// The Gronwall envelope of the second moment,
/// D(t) = r0^2 + 2(1+D)t + 2D e^{2Dt} int_0^t (r0^2 + 2(1+D)s) e^{-2Ds} ds.
double second_moment_envelope(double r0, double D, double t);
/// The matching fourth-moment envelope.
double fourth_moment_envelope(double r0, double D, double t);

/// E[r^2] and E[r^4] of the stopped process against the envelopes. The
/// witness D must come from a passing (B3) audit.
McReport moment_bound_check(const ManifoldModel& manifold, const DriftField& V, const Point& p, const Point& x0,
                            std::optional<double> D, const std::vector<double>& t_grid, const EnsembleSpec& ens,
                            double exit_radius = std::numeric_limits<double>::infinity());

/// Expectation bounds that follow from (B1), (B2) or (B3) with witness D.
McReport lyapunov_check(const ManifoldModel& manifold, const DriftField& V, const Point& p, const Point& x0,
                        std::optional<double> D, ConditionId condition, double t, const EnsembleSpec& ens,
                        double exit_radius = std::numeric_limits<double>::infinity());

/// Fraction of paths leaving B_R(p) before t, for each R, against the
/// envelope D(t)/R^2; the fractions must not increase with R.
McReport conservativeness_check(const ManifoldModel& manifold, const DriftField& V, const Point& p,
                                const Point& x0, std::optional<double> D, const std::vector<double>& radii,
                                double t, const EnsembleSpec& ens);

}  // namespace vharm
