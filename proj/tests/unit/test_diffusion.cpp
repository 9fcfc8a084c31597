#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "support/diffusion_oracles.hpp"
#include "vharm/diffusion/checks.hpp"
#include "vharm/diffusion/recurrence.hpp"
#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/numerics.hpp"

using namespace vharm;

namespace {

const Point kOrigin2 = make_vec({0, 0});

DriftField log_potential_drift() {
  const auto M = ManifoldModel::euclidean(2);
  return DriftField::gradient_of(M, ScalarField::from_expression(Expression::parse("log(1+r2)", 2)));
}

ScalarField expr_field(const std::string& text, int n) { return ScalarField::from_expression(Expression::parse(text, n)); }

}  // namespace

TEST_CASE("step: flat examples") {
  const auto M = ManifoldModel::euclidean(3);
  const Point x = make_vec({0.1, -2, 3});
  const Vec dW = make_vec({0.01, 0.02, -0.03});
  CHECK((step(M, DriftField::zero(3), x, dW, 1e-3) - (x + std::sqrt(2.0) * dW)).norm() == 0.0);
  const Vec c = make_vec({1, -1, 2});
  CHECK((step(M, DriftField::constant(c), x, dW, 1e-3) - (x + std::sqrt(2.0) * dW - 1e-3 * c)).norm() < 1e-15);
  CHECK_THROWS_AS(step(M, DriftField::zero(3), x, dW, 0.0), InputError);
}

TEST_CASE("step: chart SDE coefficients reproduce the Laplacian drift and inverse metric") {
  // sigma sigma^T = g^{-1} and the drift equals -g^{ij} Gamma^k_ij - V^k in every kind.
  std::vector<ManifoldModel> models{ManifoldModel::hyperbolic(3, -1.0), ManifoldModel::sphere(3, 1.0),
                                    ManifoldModel::rotationally_symmetric(3, WarpProfile::cubic(0.1))};
  const Point x = make_vec({0.2, -0.1, 0.3});
  for (const auto& M : models) {
    const DriftField V = DriftField::zero(3);
    const double dt = 1e-3;
    const Point drift_only = step(M, V, x, Vec::Zero(3), dt);
    const Vec b = (drift_only - x) / dt;
    const Mat ginv = M.inverse_metric_at(x);
    const Christoffel G = M.christoffel(x);
    for (int k = 0; k < 3; ++k) CHECK(b(k) == doctest::Approx(-(ginv.cwiseProduct(G.upper[k])).sum()).epsilon(1e-9));
    Mat S(3, 3);
    for (int i = 0; i < 3; ++i) S.col(i) = (step(M, V, x, Vec::Unit(3, i), dt) - drift_only) / std::sqrt(2.0);
    CHECK((S * S.transpose() - ginv).norm() < 1e-12);
  }
}

TEST_CASE("simulate: path invariants, exit flags and determinism") {
  const auto H = ManifoldModel::hyperbolic(2, -1.0);
  const Point x0 = point_at_distance(H, kOrigin2, 0.5);
  const auto path = simulate(H, DriftField::zero(2), x0, 1.0, 1e-2, RngSpec{7, 3});
  REQUIRE(path.times.size() == 101);
  CHECK(path.points.size() == 101);
  CHECK(path.radial.size() == 101);
  CHECK(path.brownian_increments.size() == 100);
  for (std::size_t k = 0; k < path.points.size(); ++k)
    CHECK(std::abs(path.radial[k] - H.distance(kOrigin2, path.points[k])) <= 1e-12);
  for (double l : path.local_time_residual) CHECK(l == 0.0);

  const auto again = simulate(H, DriftField::zero(2), x0, 1.0, 1e-2, RngSpec{7, 3});
  for (std::size_t k = 0; k < path.points.size(); ++k) CHECK(path.points[k] == again.points[k]);
  const auto other = simulate(H, DriftField::zero(2), x0, 1.0, 1e-2, RngSpec{7, 4});
  CHECK(other.points.back() != path.points.back());

  const auto stopped = simulate(ManifoldModel::euclidean(2), DriftField::zero(2), kOrigin2, 5.0, 1e-2, RngSpec{1, 1},
                                SimulationOptions{std::nullopt, 0.5});
  REQUIRE(stopped.exited);
  CHECK(stopped.exited->boundary == "domain");
  CHECK(stopped.radial[stopped.exited->index] >= 0.5);
  CHECK(stopped.points.back() == stopped.points[stopped.exited->index]);
}

TEST_CASE("ensemble results do not depend on the thread count") {
  const auto M = ManifoldModel::euclidean(2);
  auto f = [](const Point& x) { return x.squaredNorm(); };
  const auto one = expectation_at_times(M, DriftField::zero(2), kOrigin2, {0.5, 1.0}, EnsembleSpec{2000, 0.01, 5, 1}, f);
  const auto four = expectation_at_times(M, DriftField::zero(2), kOrigin2, {0.5, 1.0}, EnsembleSpec{2000, 0.01, 5, 4}, f);
  for (int j = 0; j < 2; ++j) {
    CHECK(one[j].mean == four[j].mean);
    CHECK(one[j].stderr_ == four[j].stderr_);
  }
}

TEST_CASE("simulate: Gaussian moments") {
  const auto M = ManifoldModel::euclidean(2);
  const auto est = expectation_at_times(M, DriftField::zero(2), kOrigin2, {0.5, 1.0}, EnsembleSpec{40000, 0.01, 11, 0},
                                        [](const Point& x) { return x.squaredNorm(); });
  CHECK(accepted(equality_status(est[0].mean - 2.0, est[0].stderr_)));
  CHECK(accepted(equality_status(est[1].mean - 4.0, est[1].stderr_)));
  const auto lin = expectation_at_times(M, DriftField::constant(make_vec({1, 0})), kOrigin2, {1.0},
                                        EnsembleSpec{40000, 0.01, 12, 0}, [](const Point& x) { return x(0); });
  CHECK(accepted(equality_status(lin[0].mean + 1.0, lin[0].stderr_)));
}

TEST_CASE("weak first-order convergence under dt halving") {
  const auto M = ManifoldModel::euclidean(2);
  const auto V = DriftField::from_function(2, [](const Point& x) { return Vec(x); });
  const Point x0 = make_vec({1, 0});
  const auto res = weak_order_check(M, V, x0, 1.0, [](const Point& x) { return x.squaredNorm(); }, 0.1, 4,
                                    EnsembleSpec{20000, 0.1, 21, 0});
  CHECK(accepted(res.status));
  for (double r : res.ratios) CHECK((r >= 1.5 && r <= 3.0));
  for (std::size_t l = 0; l < res.means.size(); ++l) {
    const double exact = oracle::euler_ou_second_moment(2, 1.0, 1.0, res.dts[l]);
    CHECK(accepted(equality_status(res.means[l].mean - exact, res.means[l].stderr_)));
  }
}

TEST_CASE("generator check on the hyperbolic disk") {
  const auto H = ManifoldModel::hyperbolic(2, -1.0);
  const auto bump = expr_field("exp(-4*r2)*(1+x1)", 2);
  const auto row = generator_check(H, DriftField::zero(2), make_vec({0.2, 0.1}), bump, 1e-4, 100000, 3);
  CHECK(accepted(row.status));
  const auto V = DriftField::constant(make_vec({0.5, -1}));
  CHECK(accepted(generator_check(H, V, make_vec({-0.3, 0.2}), bump, 1e-4, 100000, 4).status));
}

TEST_CASE("Ito residual") {
  const auto M = ManifoldModel::euclidean(2);
  const auto path = simulate(M, DriftField::zero(2), make_vec({0.3, 0.4}), 1.0, 0.01, RngSpec{1, 0});
  for (double m : ito_residual(M, DriftField::zero(2), path, ScalarField::constant(2.5))) CHECK(m == 0.0);
  // |x|^2: residual = |X_t|^2 - |x0|^2 - 4t on every path.
  const auto res = ito_residual(M, DriftField::zero(2), path, expr_field("r2", 2));
  for (std::size_t k = 0; k < res.size(); ++k)
    CHECK(res[k] == doctest::Approx(path.points[k].squaredNorm() - 0.25 - 4 * path.times[k]).epsilon(1e-10));
  const auto row = ito_martingale_check(M, DriftField::zero(2), make_vec({0.3, 0.4}), 1.0, expr_field("r2", 2),
                                        EnsembleSpec{20000, 0.01, 2, 0});
  CHECK(accepted(row.status));
  const auto qv = ito_quadratic_variation(M, DriftField::zero(2), make_vec({0.3, 0.4}), 1.0, expr_field("x1", 2),
                                          EnsembleSpec{5000, 0.001, 3, 0});
  CHECK(qv.predicted.mean == doctest::Approx(2.0));
  CHECK(qv.relative_error < 0.05);
}

TEST_CASE("property: Ito residuals of random smooth functions are martingales") {
  RandomStream rng(404, 0);
  const auto M = ManifoldModel::euclidean(2);
  const auto V = DriftField::from_function(2, [](const Point& x) { return Vec(0.5 * x); });
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = 2 * rng.uniform() - 1, b = 2 * rng.uniform() - 1, c = rng.uniform(), w = 0.5 + rng.uniform();
    const std::string text = fmt::format("{}*x1*x2 + {}*sin({}*x1) + {}*exp(-r2)", a, b, w, c);
    const auto row = ito_martingale_check(M, V, make_vec({0.2, -0.1}), 1.0, expr_field(text, 2),
                                          EnsembleSpec{3000, 0.01, 100 + static_cast<std::uint64_t>(i), 0});
    if (!accepted(row.status)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("Kendall decomposition") {
  const auto E = ManifoldModel::euclidean(2);
  const auto rep = kendall_check(E, DriftField::zero(2), kOrigin2, make_vec({1, 0}), {0.25, 0.5, 1.0},
                                 EnsembleSpec{20000, 1e-3, 31, 0});
  CHECK(accepted(rep.overall()));
  CHECK(rep.rows.back().quadratic_variation.mean >= 0.95);
  CHECK(rep.rows.back().quadratic_variation.mean <= 1.05);

  const auto H = ManifoldModel::hyperbolic(2, -1.0);
  const auto hyp = kendall_check(H, DriftField::zero(2), kOrigin2, point_at_distance(H, kOrigin2, 1.0), {0.25, 0.5, 1.0},
                                 EnsembleSpec{10000, 1e-3, 32, 0});
  CHECK(accepted(hyp.overall()));
  CHECK_THROWS_AS(kendall_check(ManifoldModel::sphere(2), DriftField::zero(2), kOrigin2, make_vec({0.5, 0}), {1.0},
                                EnsembleSpec{10, 1e-3, 1, 0}),
                  UnsupportedConfigurationError);
}

TEST_CASE("Kendall decomposition: Bessel mean and radial drift") {
  for (int n : {2, 3}) {
    const auto E = ManifoldModel::euclidean(n);
    Point x0 = Vec::Zero(n);
    x0(0) = 5.0;
    const auto rep = kendall_check(E, DriftField::zero(n), Point(Vec::Zero(n)), x0, {0.5}, EnsembleSpec{20000, 1e-2, 41, 0});
    const auto& row = rep.rows.front();
    const double oracle = oracle::bessel_mean(n, 5.0, 0.5);
    CHECK(accepted(equality_status(row.radius.mean - oracle, row.radius.stderr_)));
    CHECK(accepted(equality_status(5.0 + row.drift_integral.mean - oracle, row.radius.stderr_)));
  }
  // V = x points outward, so -<V, grad r> = -r lowers the radial drift by |x|.
  const auto E = ManifoldModel::euclidean(2);
  const auto V = DriftField::from_function(2, [](const Point& x) { return Vec(x); });
  const auto rep = kendall_check(E, V, kOrigin2, make_vec({2, 0}), {0.25, 0.5}, EnsembleSpec{20000, 1e-3, 42, 0});
  CHECK(accepted(rep.overall()));
  CHECK(rep.rows.back().drift_integral.mean < 0.0);
}

TEST_CASE("moment envelopes") {
  CHECK(second_moment_envelope(1.5, 2.0, 0.0) == doctest::Approx(2.25));
  CHECK(second_moment_envelope(0.7, 0.0, 0.3) == doctest::Approx(0.49 + 0.6));
  // D = 1, r0 = 0: 4 + 2 e^2 int_0^1 4 s e^{-2s} ds with int_0^1 4 s e^{-2s} ds = 1 - 3 e^{-2}.
  const double d1 = 4 + 2 * std::exp(2.0) * (1 - 3 * std::exp(-2.0));
  CHECK(second_moment_envelope(0.0, 1.0, 1.0) == doctest::Approx(d1).epsilon(1e-11));
  CHECK(second_moment_envelope(0.0, 1.0, 1.0) > 4.0);
  // D = 0: r0^4 + 12 int_0^t (r0^2 + 2s) ds.
  CHECK(fourth_moment_envelope(1.2, 0.0, 0.8) == doctest::Approx(std::pow(1.2, 4) + 12 * (1.44 * 0.8 + 0.64)).epsilon(1e-9));
  CHECK(fourth_moment_envelope(0.0, 1.0, 1.0) > 32.0);
  CHECK(fourth_moment_envelope(2.0, 1.0, 0.0) == doctest::Approx(16.0));
  // Monotone in t and D.
  CHECK(second_moment_envelope(1, 1, 0.5) < second_moment_envelope(1, 1, 0.6));
  CHECK(second_moment_envelope(1, 1, 0.5) < second_moment_envelope(1, 2, 0.5));
}

TEST_CASE("moment bound check") {
  const auto E = ManifoldModel::euclidean(2);
  const auto rep = moment_bound_check(E, DriftField::zero(2), kOrigin2, kOrigin2, 1.0, {0.25, 0.5, 1.0},
                                      EnsembleSpec{20000, 0.01, 51, 0});
  CHECK(rep.overall() == Status::pass);
  REQUIRE(rep.rows.size() == 6);
  CHECK(rep.rows[5].statistic == "E[r^4]");
  CHECK(accepted(equality_status(rep.rows[5].estimate.mean - 32.0, rep.rows[5].estimate.stderr_)));
  CHECK_THROWS_AS(moment_bound_check(E, DriftField::zero(2), kOrigin2, kOrigin2, std::nullopt, {1.0},
                                     EnsembleSpec{10, 0.01, 1, 0}),
                  PreconditionError);
  std::ostringstream csv;
  write_mc_csv(csv, {rep});
  CHECK(csv.str().rfind("experiment_id,t,statistic,mean,stderr,bound,verdict\nmoment_bound,0.25,E[r^2],", 0) == 0);
}

TEST_CASE("Lyapunov bounds") {
  const auto E = ManifoldModel::euclidean(2);
  const EnsembleSpec ens{20000, 0.01, 61, 0};
  const auto b1 = lyapunov_check(E, DriftField::zero(2), kOrigin2, kOrigin2, 1.0, ConditionId::B1, 1.0, ens);
  CHECK(b1.rows.front().bound == 4.0);
  CHECK(b1.overall() == Status::boundary);
  const auto b3 = lyapunov_check(E, DriftField::zero(2), kOrigin2, kOrigin2, 1.0, ConditionId::B3, 1.0, ens);
  CHECK(b3.overall() == Status::pass);
  CHECK(b3.rows.front().estimate.mean < std::log(5.0));
  const Point far = make_vec({10, 0});
  for (auto c : {ConditionId::B1, ConditionId::B2, ConditionId::B3})
    CHECK(accepted(lyapunov_check(E, DriftField::zero(2), kOrigin2, far, 1.0, c, 0.01, ens).overall()));
  CHECK_THROWS_AS(lyapunov_check(E, DriftField::zero(2), kOrigin2, far, 1.0, ConditionId::A1, 0.01, ens), InputError);
}

TEST_CASE("conservativeness") {
  const auto E = ManifoldModel::euclidean(2);
  const auto rep = conservativeness_check(E, log_potential_drift(), kOrigin2, kOrigin2, 1.0, {1, 2, 4, 8}, 1.0,
                                          EnsembleSpec{5000, 0.01, 71, 0});
  CHECK(accepted(rep.overall()));
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].estimate.mean <= rep.rows[i - 1].estimate.mean);
  CHECK(rep.rows.back().estimate.mean == 0.0);
}

TEST_CASE("recurrence probes against harmonic-function oracles") {
  const EnsembleSpec ens{20000, 1e-2, 81, 0};
  const auto R3 = ManifoldModel::euclidean(3);
  const auto p3 = recurrence_probe(R3, DriftField::zero(3), Point(Vec::Zero(3)), 1, 4, 2, ens);
  CHECK(p3.censored_fraction == 0.0);
  CHECK(accepted(equality_status(p3.probability.mean - 1.0 / 3.0, p3.probability.stderr_)));
  const auto R2 = ManifoldModel::euclidean(2);
  const auto p2 = recurrence_probe(R2, DriftField::zero(2), kOrigin2, 1, 4, 2, ens);
  CHECK(accepted(equality_status(p2.probability.mean - 0.5, p2.probability.stderr_)));
  const auto pf = recurrence_probe(R2, log_potential_drift(), kOrigin2, 1, 8, 2, ens);
  CHECK(accepted(equality_status(pf.probability.mean - oracle::log_potential_annulus_probability(1, 8, 2),
                                 pf.probability.stderr_)));
  CHECK_THROWS_AS(recurrence_probe(R2, DriftField::zero(2), kOrigin2, 2, 4, 1, ens), InputError);
}

TEST_CASE("recurrence scans classify recurrent and transient diffusions") {
  const EnsembleSpec ens{10000, 0.1, 91, 0};
  const auto R2 = ManifoldModel::euclidean(2);
  const auto ex = recurrence_scan(R2, log_potential_drift(), kOrigin2, 1, 2, {4, 8, 16}, ens);
  CHECK(ex.trend == Status::pass);
  CHECK(ex.classification == RecurrenceClass::recurrent);
  const auto flat2 = recurrence_scan(R2, DriftField::zero(2), kOrigin2, 1, 2, {4, 8, 16}, ens);
  CHECK(flat2.classification == RecurrenceClass::recurrent);
  const auto R3 = ManifoldModel::euclidean(3);
  const auto flat3 = recurrence_scan(R3, DriftField::zero(3), Point(Vec::Zero(3)), 1, 2, {4, 8, 16},
                                     EnsembleSpec{40000, 0.1, 92, 0});
  CHECK(flat3.classification == RecurrenceClass::transient);
}
