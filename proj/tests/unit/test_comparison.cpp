#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vharm/comparison/audit.hpp"
#include "vharm/comparison/comparison.hpp"
#include "vharm/errors.hpp"
#include "vharm/geometry/curvature.hpp"
#include "vharm/numerics.hpp"
#include "vharm/random.hpp"

using namespace vharm;

namespace {

DriftField potential_drift(const ManifoldModel& M, const std::string& expr) {
  return DriftField::gradient_of(M, ScalarField::from_expression(Expression::parse(expr, M.dim())));
}

ComparisonInput flat_input(int n, DriftField V, EffectiveDimension m) {
  return ComparisonInput::make(ManifoldModel::euclidean(n), std::move(V), m, 0.0, Point(Vec::Zero(n)));
}

}  // namespace

TEST_CASE("f_V along rays") {
  const auto zero = flat_input(2, DriftField::zero(2), EffectiveDimension::finite(0));
  CHECK(f_V_along_ray(zero, make_vec({1, 0}), 3.0) == 0.0);

  const auto radial = flat_input(2, DriftField::from_function(2, [](const Point& x) { return Vec(x); }),
                                 EffectiveDimension::finite(0));
  CHECK(f_V_along_ray(radial, make_vec({0, 1}), 2.0) == doctest::Approx(2.0).epsilon(1e-12));

  // Gradient case: f(gamma_r) - f(p) from a base point away from the origin.
  const auto M = ManifoldModel::euclidean(2);
  const auto expr = Expression::parse("2*log(2+r2) + 0.3*x1*x2", 2);
  auto in = ComparisonInput::make(M, potential_drift(M, expr.source()), EffectiveDimension::finite(0), 0.0,
                                  make_vec({0.5, -0.2}));
  const Vec dir = make_vec({0.6, 0.8});
  for (double r : {0.3, 1.0, 2.5}) {
    const Point x = in.base + r * dir;
    CHECK(f_V_along_ray(in, dir, r) == doctest::Approx(expr.evaluate(x) - expr.evaluate(in.base)).epsilon(1e-10));
  }
}

TEST_CASE("s_p examples") {
  const auto zero = flat_input(2, DriftField::zero(2), EffectiveDimension::finite(0));
  CHECK(s_p(zero, make_vec({1, 0}), 1.7) == doctest::Approx(1.7));

  // V_gamma(t) = t along e1 with n - m = 2.
  const auto unit = flat_input(2, DriftField::constant(make_vec({1, 0})), EffectiveDimension::finite(0));
  CHECK(unit.c_p == 1.0);
  CHECK(s_p(unit, make_vec({1, 0}), 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

  // Gradient case with the default C_p reproduces int_0^r exp(-2 f(gamma_t)/(n-m)) dt.
  const auto M = ManifoldModel::euclidean(2);
  auto f = [](const Point& x) { return 2 * std::log(2 + x.squaredNorm()) + x(0); };
  const auto in = ComparisonInput::make(M, potential_drift(M, "2*log(2+r2) + x1"), EffectiveDimension::finite(0),
                                        0.0, make_vec({0.3, 0.1}));
  const Vec dir = make_vec({-1, 0});
  const double expected = adaptive_simpson(
      [&](double t) { return std::exp(-2.0 * f(Point(in.base + t * dir)) / 2.0); }, 0.0, 2.0, 1e-13);
  CHECK(s_p(in, dir, 2.0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK_THROWS_AS(s_p(flat_input(2, DriftField::zero(2), EffectiveDimension::finite(2)), dir, 1.0),
                  InvalidConfigurationError);
}

TEST_CASE("cot_kappa") {
  CHECK(cot_kappa(0, 2) == 0.5);
  CHECK(cot_kappa(1, M_PI / 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cot_kappa(-1, 1) == doctest::Approx(1.0 / std::tanh(1.0)));
  CHECK(cot_kappa(-1, 1) == doctest::Approx(1.31304).epsilon(1e-5));
  CHECK_THROWS_AS(cot_kappa(0, 0), PoleError);
  CHECK_THROWS_AS(cot_kappa(1, M_PI), DomainError);
  RandomStream rng(2, 2);
  for (int i = 0; i < 1000; ++i) {
    const double r = std::exp(20 * rng.uniform() - 10);
    // Exact up to the rounding of the final product.
    CHECK(std::abs(cot_kappa(0, r) * r - 1.0) <= std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("classical comparison bound") {
  CHECK(classical_comparison_bound(3, -1, 1) == doctest::Approx(2.0 / std::tanh(1.0)));
  CHECK(classical_comparison_bound(3, -1, 1) == doctest::Approx(2.62608).epsilon(1e-5));
  CHECK(classical_comparison_bound(2, 0, 2) == 0.5);
  CHECK(classical_comparison_bound(2, -1e-12, 2) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(classical_comparison_bound(2, -4, 0.5) == doctest::Approx(2.62608).epsilon(1e-5));
  CHECK_THROWS_AS(classical_comparison_bound(2, -1, 0), PoleError);
}

TEST_CASE("comparison bound: equality on model spaces with V = 0") {
  for (int n : {2, 3}) {
    const auto flat = flat_input(n, DriftField::zero(n), EffectiveDimension::finite(n));
    const Vec dir = Vec::Unit(n, 0);
    for (double r : {0.1, 0.7, 3.0, 10.0}) {
      const double bound = laplacian_comparison_bound(flat, dir, r);
      CHECK(bound == doctest::Approx((n - 1) / r).epsilon(1e-14));
      CHECK(std::abs(measured_radial_laplacian(flat, dir, r) - bound) <= 1e-8 * bound);
    }
  }
  const auto H = ManifoldModel::hyperbolic(2, -1.0);
  const auto hyp = ComparisonInput::make(H, DriftField::zero(2), EffectiveDimension::finite(2), -1.0, make_vec({0, 0}));
  const auto frame = RadialFrame::uniform(H, make_vec({0, 0}), 5, 10.5);
  for (const auto& dir : frame.directions)
    for (double r : {0.1, 1.0, 4.0, 10.0}) {
      const double bound = laplacian_comparison_bound(hyp, dir, r);
      CHECK(bound == doctest::Approx(1.0 / std::tanh(r)).epsilon(1e-14));
      CHECK(std::abs(measured_radial_laplacian(hyp, dir, r) - bound) <= 1e-8 * bound);
    }
}

TEST_CASE("comparison bound dominates the measured weighted Laplacian in the potential example") {
  const auto M = ManifoldModel::euclidean(2);
  const auto in = ComparisonInput::make(M, potential_drift(M, "2*log(2+r2)"), EffectiveDimension::finite(0), 0.0,
                                        make_vec({0, 0}));
  const auto frame = RadialFrame::uniform(M, make_vec({0, 0}), 8, 5.0);
  for (const auto& dir : frame.directions)
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
      const double bound = laplacian_comparison_bound(in, dir, r);
      const double measured = measured_radial_laplacian(in, dir, r);
      CHECK(measured <= bound);
      // With C_p = e^{-f(p)} the bound is 2 e^{-f}/int_0^r e^{-f}.
      const double denom = adaptive_simpson([](double t) { return 1.0 / ((2 + t * t) * (2 + t * t)); }, 0, r, 1e-14);
      CHECK(bound == doctest::Approx(2.0 / ((2 + r * r) * (2 + r * r)) / denom).epsilon(1e-9));
    }
}

TEST_CASE("s_p is increasing and bounded by the oscillation envelope") {
  const auto M = ManifoldModel::euclidean(2);
  const auto V = DriftField::from_function(2, [](const Point& x) { return make_vec({std::sin(x(1)), 0.5 * x(0)}); });
  const auto in = ComparisonInput::make(M, V, EffectiveDimension::finite(-1), 0.0, make_vec({0, 0}), 1.3);
  const Vec dir = make_vec({0.6, -0.8});
  double prev = 0.0;
  for (double r = 0.25; r <= 3.0; r += 0.25) {
    const double s = s_p(in, dir, r);
    CHECK(s > prev);
    prev = s;
    double sup = 0.0;
    for (double t = 0; t <= r; t += 0.01) sup = std::max(sup, std::abs(f_V_along_ray(in, dir, std::max(t, 1e-9))));
    CHECK(s <= in.c_p * r * std::exp(2 * sup / 3.0) * (1 + 1e-9));
  }
}

TEST_CASE("audit: flat space with V = 0") {
  for (int n : {2, 3}) {
    const auto in = flat_input(n, DriftField::zero(n), EffectiveDimension::finite(0));
    const auto frame = RadialFrame::uniform(in.manifold, Point(Vec::Zero(n)), 8, 64);
    const auto audit = audit_conditions(in, frame,
                                        {ConditionId::A1, ConditionId::A2, ConditionId::A3, ConditionId::B1,
                                         ConditionId::B2, ConditionId::B3});
    for (const auto& rep : audit.reports) {
      CHECK(rep.holds);
      CHECK(rep.violations.empty());
      CHECK(rep.witness >= 1.0);
    }
    CHECK(audit.find(ConditionId::A2)->witness == 1.0);
    CHECK(audit.find(ConditionId::B2)->witness == doctest::Approx(std::max(1.0, n - 1.0)));
    CHECK(audit.find(ConditionId::B3)->witness == doctest::Approx(std::max(1.0, n - 1.0)));
    // r Delta r = n - 1 <= 2D needs only D = max(1, (n-1)/2).
    CHECK(audit.find(ConditionId::B1)->witness == doctest::Approx(std::max(1.0, (n - 1) / 2.0)));
    CHECK(implication_counterexamples(audit, true).empty());
  }
}

TEST_CASE("audit: potential example takes the starred path for A1") {
  const auto M = ManifoldModel::euclidean(2);
  const auto in = ComparisonInput::make(M, potential_drift(M, "2*log(2+r2)"), EffectiveDimension::finite(0), 0.0,
                                        make_vec({0, 0}));
  const auto frame = RadialFrame::uniform(M, make_vec({0, 0}), 8, 64);
  const auto audit = audit_conditions(in, frame, {ConditionId::A1, ConditionId::B1, ConditionId::B3});
  const auto* a1 = audit.find(ConditionId::A1);
  CHECK(a1->holds);
  CHECK(a1->starred_holds);
  CHECK(a1->note.find("A1*") != std::string::npos);
  CHECK(audit.find(ConditionId::B1)->holds);
  CHECK(audit.find(ConditionId::B3)->holds);
  std::ostringstream csv;
  write_audit_csv(csv, audit.rows);
  CHECK(csv.str().rfind("condition_id,radius,lhs,rhs,D_witness,pass\n", 0) == 0);
}

TEST_CASE("audit: bounded drift gives (B3) but not (B1)") {
  const auto in = flat_input(2, DriftField::constant(make_vec({1, 0})), EffectiveDimension::plus_infinity());
  const auto frame = RadialFrame::uniform(in.manifold, make_vec({0, 0}), 16, 64);
  const auto audit = audit_conditions(in, frame, {ConditionId::A2, ConditionId::B1, ConditionId::B3});
  CHECK(audit.find(ConditionId::B3)->holds);
  CHECK(!audit.find(ConditionId::B1)->holds);
  CHECK(!audit.find(ConditionId::B1)->violations.empty());
  CHECK(!audit.find(ConditionId::A2)->holds);
}

TEST_CASE("audit: hyperbolic plane needs linear growth") {
  const auto H = ManifoldModel::hyperbolic(2, -1.0);
  const auto in = ComparisonInput::make(H, DriftField::zero(2), EffectiveDimension::finite(2), -1.0, make_vec({0, 0}));
  const auto frame = RadialFrame::uniform(H, make_vec({0, 0}), 4, 16);
  const auto audit = audit_conditions(in, frame, {ConditionId::B1, ConditionId::B2, ConditionId::B3});
  CHECK(!audit.find(ConditionId::B1)->holds);
  CHECK(audit.find(ConditionId::B2)->holds);
  CHECK(audit.find(ConditionId::B3)->holds);
  CHECK_THROWS_AS(audit_conditions(in, RadialFrame::uniform(H, make_vec({0, 0}), 4, 0.1), {ConditionId::B1}),
                  InputError);
}

TEST_CASE("property: measured r Delta_V r never exceeds the reported (Bi) bound") {
  RandomStream rng(99, 0);
  const auto M = ManifoldModel::euclidean(2);
  std::vector<ComparisonInput> configs{
      flat_input(2, DriftField::zero(2), EffectiveDimension::finite(0)),
      ComparisonInput::make(M, potential_drift(M, "2*log(2+r2)"), EffectiveDimension::finite(0), 0.0, make_vec({0, 0})),
      ComparisonInput::make(M, potential_drift(M, "log(1+r2)"), EffectiveDimension::finite(1), 0.0, make_vec({0, 0}))};
  for (const auto& in : configs) {
    const auto sample = sample_weighted_ricci(in.manifold, in.drift, in.m, 32.0, 1000, 7);
    REQUIRE(sample.negatives == 0);
    const auto frame = RadialFrame::uniform(M, make_vec({0, 0}), 12, 32);
    const auto audit = audit_conditions(in, frame, {ConditionId::B1, ConditionId::B2, ConditionId::B3});
    for (const auto& rep : audit.reports) {
      if (!rep.holds) continue;
      const int i = static_cast<int>(rep.id) - static_cast<int>(ConditionId::B1) + 1;
      for (int s = 0; s < 200; ++s) {
        const double r = 32.0 * rng.uniform();
        const double a = 2 * M_PI * rng.uniform();
        const Point x = make_vec({r * std::cos(a), r * std::sin(a)});
        CHECK(r * radial_laplacian(M, in.drift, make_vec({0, 0}), x) <= rep.witness * (1 + std::pow(r, i - 1)) + 1e-9);
      }
    }
  }
}
