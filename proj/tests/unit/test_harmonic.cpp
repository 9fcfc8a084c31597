#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "vharm/errors.hpp"
#include "vharm/harmonic/liouville.hpp"
#include "vharm/numerics.hpp"
#include "vharm/random.hpp"

using namespace vharm;

namespace {

const ManifoldModel R1 = ManifoldModel::euclidean(1);
const ManifoldModel R2 = ManifoldModel::euclidean(2);

BoundaryFn angle_pattern(std::function<Point(double)> f) {
  return [f](const Point& x) { return f(std::atan2(x(1), x(0))); };
}

// u(x) = (e^{cx} - 1)/(e^c - 1) solves u'' - c u' = 0 with u(0) = 0, u(1) = 1.
double drift_ode_solution(double c, double x) { return std::expm1(c * x) / std::expm1(c); }

struct Errors1d {
  double value = 0.0;
  double gradient = 0.0;
};

// Max-norm errors of node values and of |du| against the closed forms.
Errors1d errors_1d(const DriftField& V, double h, const std::function<double(double)>& exact,
                   const std::function<double(double)>& exact_derivative) {
  const auto g = [](const Point& x) { return make_vec({x(0) < 0.5 ? 0.0 : 1.0}); };
  SolverOptions opts;
  opts.tol = 1e-10;
  const SolveResult res = solve(R1, make_vec({0.5}), 0.5, h, g, R1, V, opts);
  const auto density = energy_density(res.grid);
  Errors1d err;
  for (std::size_t node : res.grid.interior_nodes()) {
    const double x = res.grid.position(node)(0);
    err.value = std::max(err.value, std::abs(res.grid.value(node)(0) - exact(x)));
    err.gradient = std::max(err.gradient, std::abs(std::sqrt(density[node]) - exact_derivative(x)));
  }
  return err;
}

// int_0^x e^{s^2/2} ds, the primitive solving u'' - x u' = 0.
double ou_primitive(double x) {
  return adaptive_simpson([](double s) { return std::exp(0.5 * s * s); }, 0.0, x, 1e-15);
}

Point cap_pattern(double th) { return make_vec({0.4 * std::cos(th), 0.2 * std::sin(2 * th)}); }

}  // namespace

TEST_CASE("solver: 1-D Dirichlet problems") {
  SUBCASE("V = 0 gives u(x) = x with |du|^2 = 1") {
    const auto g = [](const Point& x) { return make_vec({x(0) < 0.5 ? 0.0 : 1.0}); };
    const SolveResult res = solve(R1, make_vec({0.5}), 0.5, 1.0 / 32, g, R1, DriftField::zero(1));
    CHECK(res.residual < 1e-9);
    CHECK(res.grid.solved());
    const auto density = energy_density(res.grid);
    for (std::size_t node : res.grid.interior_nodes()) {
      CHECK(res.grid.value(node)(0) == doctest::Approx(res.grid.position(node)(0)).epsilon(1e-9));
      CHECK(density[node] == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(res.energy_nonincreasing());
  }
  SUBCASE("V = 1: closed form and second-order convergence") {
    const auto g = [](const Point& x) { return make_vec({x(0) < 0.5 ? 0.0 : 1.0}); };
    const SolveResult res =
        solve(R1, make_vec({0.5}), 0.5, 1.0 / 64, g, R1, DriftField::constant(make_vec({1.0})), SolverOptions{});
    const auto mid = res.grid.nearest_node(make_vec({0.5}));
    REQUIRE(mid);
    CHECK(drift_ode_solution(1.0, 0.5) == doctest::Approx(0.37754).epsilon(1e-5));
    CHECK(res.grid.value(*mid)(0) == doctest::Approx(0.37754).epsilon(1e-4));
    CHECK(res.energy_nonincreasing());
  }
  SUBCASE("V = 1: exponential weights are exact at the nodes, |du| converges at O(h^2)") {
    const DriftField V = DriftField::constant(make_vec({1.0}));
    const auto exact = [](double x) { return drift_ode_solution(1.0, x); };
    const auto slope = [](double x) { return std::exp(x) / std::expm1(1.0); };
    const Errors1d e1 = errors_1d(V, 1.0 / 16, exact, slope);
    const Errors1d e2 = errors_1d(V, 1.0 / 32, exact, slope);
    const Errors1d e3 = errors_1d(V, 1.0 / 64, exact, slope);
    CHECK(e3.value < 1e-10);
    for (double ratio : {e1.gradient / e2.gradient, e2.gradient / e3.gradient}) {
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
  }
  SUBCASE("V = x: node values converge at O(h^2)") {
    const DriftField V = DriftField::gradient_of(R1, ScalarField::from_expression(Expression::parse("x1^2/2", 1)));
    const double total = ou_primitive(1.0);
    const auto exact = [total](double x) { return ou_primitive(x) / total; };
    const auto slope = [total](double x) { return std::exp(0.5 * x * x) / total; };
    const Errors1d e1 = errors_1d(V, 1.0 / 16, exact, slope);
    const Errors1d e2 = errors_1d(V, 1.0 / 32, exact, slope);
    const Errors1d e3 = errors_1d(V, 1.0 / 64, exact, slope);
    for (double ratio : {e1.value / e2.value, e2.value / e3.value}) {
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
  }
}

TEST_CASE("solver: constant data gives the constant map") {
  const Point q = make_vec({0.3, -0.2});
  for (const ManifoldModel& target : {R2, ManifoldModel::hyperbolic(2), ManifoldModel::sphere(2)}) {
    const SolveResult res = solve(R2, Point::Zero(2), 1.0, 0.125, [&](const Point&) { return q; }, target,
                                  DriftField::constant(make_vec({0.5, 1.0})));
    for (std::size_t node : res.grid.interior_nodes()) CHECK((res.grid.value(node) - q).norm() < 1e-9);
    CHECK(tension_residual(res.grid, DriftField::constant(make_vec({0.5, 1.0}))) < 1e-9);
  }
}

TEST_CASE("solver: 2-D harmonic extension of sin(angle)") {
  const SolveResult res = solve(R2, Point::Zero(2), 1.0, 1.0 / 64,
                                angle_pattern([](double th) { return make_vec({std::sin(th)}); }), R1,
                                DriftField::zero(2));
  double err = 0.0;
  for (std::size_t node : res.grid.interior_nodes()) {
    err = std::max(err, std::abs(res.grid.value(node)(0) - res.grid.position(node)(1)));
  }
  CHECK(err < 1e-3);
  CHECK(res.energy_nonincreasing());
  CHECK(res.energy_history.size() >= 2);
  // Discrete energy of u = y on the unit disk: (1/2) pi.
  CHECK(res.energy_history.back() == doctest::Approx(std::numbers::pi / 2).epsilon(0.02));
}

TEST_CASE("solver: maximum principle and energy descent with drift") {
  const DriftField V = DriftField::gradient_of(R2, ScalarField::from_expression(Expression::parse("x1^2/2 + x2", 2)));
  const auto pattern = [](double th) { return make_vec({std::sin(3 * th) + 0.5 * std::cos(th)}); };
  const SolveResult res = solve(R2, Point::Zero(2), 1.0, 1.0 / 32, angle_pattern(pattern), R1, V);
  double lo = 1e300, hi = -1e300;
  const MapGrid& u = res.grid;
  for (std::size_t node : u.interior_nodes()) {
    const MapGrid::Edge* e = u.edges(node);
    for (int k = 0; k < 4; ++k) {
      if (!e[k].to) {
        lo = std::min(lo, e[k].boundary_value(0));
        hi = std::max(hi, e[k].boundary_value(0));
      }
    }
  }
  for (std::size_t node : u.interior_nodes()) {
    CHECK(u.value(node)(0) >= lo - 1e-8);
    CHECK(u.value(node)(0) <= hi + 1e-8);
  }
  CHECK(res.energy_nonincreasing());
  CHECK(res.energy_history.back() < res.energy_history.front());
}

TEST_CASE("solver: curved targets") {
  SUBCASE("hyperbolic disk") {
    const auto res = solve(R2, Point::Zero(2), 1.0, 1.0 / 16,
                           angle_pattern([](double th) { return make_vec({0.6 * std::cos(th), 0.3 * std::sin(th)}); }),
                           ManifoldModel::hyperbolic(2), DriftField::zero(2));
    CHECK(res.residual < 1e-9);
    CHECK(res.energy_nonincreasing());
    for (std::size_t node : res.grid.interior_nodes()) CHECK(res.grid.value(node).norm() < 1.0);
  }
  SUBCASE("spherical cap inside a regular ball") {
    const auto res = solve(R2, Point::Zero(2), 1.0, 1.0 / 16, angle_pattern(cap_pattern), ManifoldModel::sphere(2),
                           DriftField::zero(2));
    CHECK(res.residual < 1e-9);
    CHECK(res.energy_nonincreasing());
    CHECK_FALSE(res.projected);
  }
  SUBCASE("data outside every regular ball") {
    CHECK_THROWS_AS(solve(R2, Point::Zero(2), 1.0, 0.25,
                          angle_pattern([](double th) { return make_vec({1.5 * std::cos(th), 1.5 * std::sin(th)}); }),
                          ManifoldModel::sphere(2), DriftField::zero(2)),
                    InputError);
  }
  SUBCASE("non-Euclidean domains are refused") {
    CHECK_THROWS_AS(solve(ManifoldModel::hyperbolic(2), Point::Zero(2), 0.5, 0.1,
                          [](const Point&) { return make_vec({0.0}); }, R1, DriftField::zero(2)),
                    UnsupportedConfigurationError);
  }
}

TEST_CASE("MapGrid: text round trip is lossless") {
  const auto res = solve(R2, make_vec({0.25, -0.5}), 0.75, 0.1,
                         angle_pattern([](double th) { return make_vec({0.3 * std::cos(th), 0.1 + 0.2 * std::sin(th)}); }),
                         ManifoldModel::hyperbolic(2), DriftField::zero(2));
  std::ostringstream first;
  res.grid.write(first);
  std::istringstream in(first.str());
  const MapGrid back = MapGrid::read(in);
  std::ostringstream second;
  back.write(second);
  CHECK(first.str() == second.str());
  CHECK(back.solved());
  for (std::size_t i = 0; i < back.node_count(); ++i) CHECK(back.value(i) == res.grid.value(i));
  std::istringstream bad("vharm-mapgrid 2\n");
  CHECK_THROWS_AS(MapGrid::read(bad), InputError);
}

TEST_CASE("growth classification") {
  const std::vector<double> radii{1, 2, 4, 8, 16};
  SUBCASE("bounded solver output") {
    const auto res = solve(R2, Point::Zero(2), 16.0, 0.5,
                           angle_pattern([](double th) { return make_vec({std::sin(th)}); }), R1, DriftField::zero(2));
    const MapView u = MapView::from_grid(std::make_shared<const MapGrid>(res.grid));
    // Data attain their sup only on the outermost sphere; the interior sup is r/16.
    const GrowthProfile g = classify_growth(u, make_vec({0.0}), {2, 4, 8, 16});
    CHECK(g.m_values.back() == doctest::Approx(1.0));
    const GrowthProfile b = classify_growth({1, 2, 4, 8}, {1.0, 1.0, 1.0, 1.0});
    CHECK(b.growth_class == GrowthClass::bounded);
    CHECK(b.satisfies(1));
    CHECK(b.satisfies(2));
    CHECK(b.satisfies(3));
  }
  SUBCASE("linear map is superlinear") {
    Mat A(2, 2);
    A << 2, 1, 0, 1;
    const MapView u = MapView::from_map(SmoothMapSpec::affine(A, make_vec({1.0, 0.0})), Point::Zero(2));
    const GrowthProfile g = classify_growth(u, Point::Zero(2), radii);
    CHECK(g.growth_class == GrowthClass::superlinear);
    CHECK_FALSE(g.satisfies(1));
    CHECK(g.exponent > 0.9);
  }
  SUBCASE("a^0.7 is (G1) but not (G2)") {
    std::vector<double> m;
    for (double a : radii) m.push_back(std::pow(a, 0.7));
    const GrowthProfile g = classify_growth(radii, m);
    CHECK(g.growth_class == GrowthClass::g1_sublinear);
    CHECK(g.satisfies(1));
    CHECK_FALSE(g.satisfies(2));
  }
  SUBCASE("sqrt-log envelopes") {
    const std::vector<double> big{4, 16, 64, 256, 1024};
    std::vector<double> slow, fast;
    for (double a : big) {
      slow.push_back(std::pow(std::log1p(a), 0.3));
      fast.push_back(std::pow(a, 0.3));
    }
    CHECK(classify_growth(big, slow).growth_class == GrowthClass::g3_sqrt_log);
    const GrowthProfile g2 = classify_growth(big, fast);
    CHECK(g2.growth_class == GrowthClass::g2_sqrt);
    CHECK_FALSE(g2.satisfies(3));
  }
  SUBCASE("input errors") {
    CHECK_THROWS_AS(classify_growth({1, 2, 4}, {1, 1, 1}), InputError);
    CHECK_THROWS_AS(classify_growth({1, 2, 4, 3}, {1, 1, 1, 1}), InputError);
    CHECK_THROWS_AS(classify_growth({1, 2, 4, 8}, {1, 2, 1, 3}), InputError);
  }
}

TEST_CASE("gradient estimate") {
  SUBCASE("constant map") {
    const MapView u = MapView::from_map(SmoothMapSpec::affine(Mat::Zero(1, 2), make_vec({3.0})), Point::Zero(2));
    const auto row = gradient_estimate(u, make_vec({3.0}), 1.0);
    CHECK(row.sup_energy == doctest::Approx(0.0));
    CHECK(row.rho == doctest::Approx(0.0));
  }
  SUBCASE("linear map: rho decreases") {
    Mat A(2, 2);
    A << 1, 2, -1, 0.5;
    const MapView u = MapView::from_map(SmoothMapSpec::affine(A, Vec::Zero(2)), Point::Zero(2));
    std::vector<GradientEstimateRow> rows;
    for (double a : {1.0, 2.0, 4.0}) rows.push_back(gradient_estimate(u, Point::Zero(2), a));
    const double op = A.jacobiSvd().singularValues()(0);
    for (const auto& r : rows) {
      CHECK(r.sup_energy == doctest::Approx(A.squaredNorm()).epsilon(1e-9));
      CHECK(r.m_u_2a == doctest::Approx(2 * r.a * op).epsilon(1e-3));
    }
    CHECK(rows[1].rho < rows[0].rho);
    CHECK(rows[2].rho < rows[1].rho);
    const auto rep = gradient_estimate_check(rows);
    CHECK(rep.status == Status::pass);
    CHECK(rep.fitted_constant == doctest::Approx(rows[0].rho));
  }
  SUBCASE("solver output on expanding balls") {
    std::vector<GradientEstimateRow> rows;
    for (double a : {1.0, 2.0, 4.0}) {
      const auto res = solve(R2, Point::Zero(2), 2 * a, 2 * a / 32,
                             angle_pattern([](double th) { return make_vec({std::sin(2 * th)}); }), R1,
                             DriftField::zero(2));
      rows.push_back(gradient_estimate(res.grid, make_vec({0.0}), a));
    }
    const auto rep = gradient_estimate_check(rows);
    CHECK(rep.status == Status::pass);
    CHECK(rep.fitted_constant > 0.0);
  }
  SUBCASE("unsolved grids are refused") {
    MapGrid grid(2, R1, Point::Zero(2), 1.0, 0.25);
    CHECK_THROWS_AS(gradient_estimate(grid, make_vec({0.0}), 0.5), PreconditionError);
  }
}

TEST_CASE("convex gauge") {
  const ConvexGauge phi(1.0, make_vec({0.1, 0.0}));
  CHECK(phi(make_vec({0.1, 0.0})) == doctest::Approx(0.0));
  RandomStream rng(5, 0);
  for (int i = 0; i < 100; ++i) CHECK(phi(make_vec({rng.normal(), rng.normal()})) > 0.0);
  const double R = 1.2;
  const auto fit = phi.fit_convexity(R, 1000, 7);
  CHECK(fit.status == Status::pass);
  CHECK(fit.violations == 0);
  // Hess phi = kappa cos(sqrt(kappa) d) g gives C >= cos R / sin^2 R.
  CHECK(fit.fitted_constant >= std::cos(R) / std::pow(std::sin(R), 2) * 0.99);
  CHECK_THROWS_AS(phi.fit_convexity(2.0, 10, 1), InputError);
  CHECK_THROWS_AS(ConvexGauge(-1.0, Point::Zero(2)), InputError);
}

TEST_CASE("submartingale check for the gauge") {
  const ManifoldModel S2 = ManifoldModel::sphere(2);
  const ConvexGauge phi(1.0, Point::Zero(2));
  SubmartingaleParams params;
  params.x0 = Point::Zero(2);
  params.ens = EnsembleSpec{2000, 0.01, 11};
  SUBCASE("constant map at o") {
    const auto res = solve(R2, Point::Zero(2), 1.0, 0.125, [](const Point&) { return Point(Point::Zero(2)); }, S2,
                           DriftField::zero(2));
    const auto rep = submartingale_phi_check(res.grid, DriftField::zero(2), phi, params);
    CHECK(rep.pointwise == Status::pass);
    CHECK(rep.monotone == Status::pass);
    for (const auto& row : rep.rows) CHECK(row.estimate.mean == doctest::Approx(0.0));
  }
  SUBCASE("harmonic map into a cap passes, a perturbed map fails") {
    auto res = solve(R2, Point::Zero(2), 1.0, 1.0 / 16, angle_pattern(cap_pattern), S2, DriftField::zero(2));
    const auto rep = submartingale_phi_check(res.grid, DriftField::zero(2), phi, params);
    CHECK(rep.pointwise == Status::pass);
    CHECK(rep.min_laplacian > -1e-4);
    CHECK(accepted(rep.monotone));
    CHECK(rep.rows.back().estimate.mean > rep.rows.front().estimate.mean);

    MapGrid bent = res.grid;
    RandomStream rng(3, 0);
    for (std::size_t node : bent.interior_nodes()) {
      bent.value(node) += 0.01 * make_vec({rng.normal(), rng.normal()});
    }
    const auto neg = submartingale_phi_check(bent, DriftField::zero(2), phi, params);
    CHECK(neg.pointwise == Status::fail);
    CHECK(neg.violations >= 1);
  }
  SUBCASE("gauge curvature must match the target") {
    const auto res = solve(R2, Point::Zero(2), 1.0, 0.25, angle_pattern(cap_pattern), S2, DriftField::zero(2));
    CHECK_THROWS_AS(submartingale_phi_check(res.grid, DriftField::zero(2), ConvexGauge(2.0, Point::Zero(2)), params),
                    InputError);
  }
}

TEST_CASE("growth lower bound and energy submartingale") {
  const EnsembleSpec ens{20000, 0.01, 21};
  SUBCASE("linear map, Gaussian equality case") {
    Mat A(2, 2);
    A << 1, 0.5, -0.3, 2;
    const MapView u = MapView::from_map(SmoothMapSpec::affine(A, Vec::Zero(2)), Point::Zero(2));
    const auto rep = liouville_lower_bound_check(u, DriftField::zero(2), Point::Zero(2), Point::Zero(2), {0.1, 0.5}, ens);
    for (const auto& row : rep.rows) {
      CHECK(accepted(row.status));
      if (row.statistic == "growth_lower_bound") {
        CHECK(row.bound == doctest::Approx(2 * row.t * A.squaredNorm()));
        CHECK(std::abs(row.estimate.mean - row.bound) <= 3 * row.estimate.stderr_);
      }
    }
  }
  SUBCASE("constant map") {
    const MapView u = MapView::from_map(SmoothMapSpec::affine(Mat::Zero(2, 2), make_vec({1.0, 1.0})), Point::Zero(2));
    const auto rep = liouville_lower_bound_check(u, DriftField::zero(2), Point::Zero(2), Point::Zero(2), {0.2},
                                                 EnsembleSpec{100, 0.01, 1});
    CHECK(rep.rows[0].bound == 0.0);
    CHECK(rep.rows[0].estimate.mean == doctest::Approx(2.0));
    CHECK(rep.overall() == Status::pass);
  }
  SUBCASE("solved nonlinear map into the hyperbolic disk") {
    const auto res = solve(R2, Point::Zero(2), 3.0, 3.0 / 48,
                           angle_pattern([](double th) { return make_vec({0.7 * std::cos(th), 0.2 * std::sin(3 * th)}); }),
                           ManifoldModel::hyperbolic(2), DriftField::zero(2));
    const MapView u = MapView::from_grid(std::make_shared<const MapGrid>(res.grid));
    const auto rep = liouville_lower_bound_check(u, DriftField::zero(2), Point::Zero(2), Point::Zero(2), {0.05, 0.2},
                                                 EnsembleSpec{5000, 0.005, 22});
    for (const auto& row : rep.rows) {
      INFO(row.statistic, " t=", row.t, " mean=", row.estimate.mean, " se=", row.estimate.stderr_, " bound=", row.bound);
      CHECK(accepted(row.status));
    }
  }
  SUBCASE("curved-above targets are refused") {
    const MapView u = MapView::from_map(
        SmoothMapSpec(R2, ManifoldModel::sphere(2), [](const Point& x) { return Point(0.1 * x); }), Point::Zero(2));
    CHECK_THROWS_AS(liouville_lower_bound_check(u, DriftField::zero(2), Point::Zero(2), Point::Zero(2), {0.1}, ens),
                    UnsupportedConfigurationError);
  }
}

TEST_CASE("decay demo") {
  DecaySpec spec;
  spec.radii = {1, 2, 4, 8};
  spec.pattern = [](const Vec& d) { return make_vec({d(1)}); };
  SUBCASE("flat: |du|(0) = 1/a") {
    const auto rep = liouville_decay_demo(spec);
    for (const auto& row : rep.rows) CHECK(row.energy_center == doctest::Approx(1.0 / (row.a * row.a)).epsilon(1e-6));
    CHECK(rep.gradient_fit.slope == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.nonincreasing);
    CHECK(rep.status == Status::pass);
  }
  SUBCASE("weighted plane f = 2 log(2 + |x|^2)") {
    spec.V = DriftField::gradient_of(R2, ScalarField::from_expression(Expression::parse("2*log(2 + x1^2 + x2^2)", 2)));
    const auto rep = liouville_decay_demo(spec);
    CHECK(rep.nonincreasing);
    CHECK(rep.status == Status::pass);
    CHECK(rep.energy_fit.slope <= -1.0);
  }
  SUBCASE("hyperbolic target") {
    spec.target = ManifoldModel::hyperbolic(2);
    spec.pattern = [](const Vec& d) { return make_vec({0.5 * d(0), 0.3 * d(1)}); };
    const auto rep = liouville_decay_demo(spec);
    CHECK(rep.status == Status::pass);
  }
}

TEST_CASE("annulus oscillation profiles") {
  const std::vector<double> radii{4, 8, 16, 32};
  const auto flat2 = annulus_oscillations(R2, DriftField::zero(2), 2.0, radii);
  const auto flat3 = annulus_oscillations(ManifoldModel::euclidean(3), DriftField::zero(3), 2.0, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(flat2[i] == doctest::Approx(std::log(2.0) / std::log(radii[i])).epsilon(1e-6));
    CHECK(flat3[i] == doctest::Approx(0.5 / (1.0 - 1.0 / radii[i])).epsilon(1e-6));
  }
}

TEST_CASE("recurrence bridge") {
  BridgeSpec spec;
  spec.a = 1.0;
  spec.r_start = 2.0;
  spec.b_values = {4, 8, 16};
  spec.radii = {4, 8, 16, 32};
  spec.inner_radius = 2.0;
  SUBCASE("plane: recurrent and decaying") {
    spec.ens = EnsembleSpec{10000, 0.1, 91};
    const auto rep = recurrence_liouville_bridge(spec);
    CHECK(rep.scan.classification == RecurrenceClass::recurrent);
    CHECK(rep.decays);
    CHECK(rep.status == Status::pass);
  }
  SUBCASE("space: transient, 1/r profiles persist") {
    spec.manifold = ManifoldModel::euclidean(3);
    spec.V = DriftField::zero(3);
    spec.ens = EnsembleSpec{40000, 0.1, 92};
    const auto rep = recurrence_liouville_bridge(spec);
    CHECK(rep.scan.classification == RecurrenceClass::transient);
    CHECK_FALSE(rep.decays);
    CHECK(rep.status == Status::pass);
  }
  SUBCASE("radii must be geometric") {
    spec.radii = {4, 8, 12};
    CHECK_THROWS_AS(recurrence_liouville_bridge(spec), InputError);
  }
}
