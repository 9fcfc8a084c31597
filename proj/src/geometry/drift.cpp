#include "vharm/geometry/drift.hpp"

#include "vharm/errors.hpp"
#include "vharm/numerics.hpp"

namespace vharm {

namespace {
constexpr double kJacobianStep = 1e-4;
}

DriftField DriftField::zero(int n) {
  DriftField d;
  d.dim_ = n;
  d.field_ = [n](const Point&) { return Vec(Vec::Zero(n)); };
  d.jacobian_ = [n](const Point&) { return Mat(Mat::Zero(n, n)); };
  d.zero_ = true;
  d.potential_ = ScalarField::constant(0.0);
  d.profile_ = [](double) { return 0.0; };
  d.description_ = "zero";
  return d;
}

DriftField DriftField::from_function(int n, VectorFn field, JacobianFn jacobian) {
  DriftField d;
  d.dim_ = n;
  d.field_ = field;
  if (jacobian) {
    d.jacobian_ = std::move(jacobian);
  } else {
    d.jacobian_ = [field](const Point& x) { return fd_jacobian(field, x, kJacobianStep); };
  }
  return d;
}

DriftField DriftField::constant(const Vec& c) {
  const int n = static_cast<int>(c.size());
  DriftField d = from_function(
      n, [c](const Point&) { return c; }, [n](const Point&) { return Mat(Mat::Zero(n, n)); });
  const double norm = c.norm();
  d.profile_ = [norm](double) { return norm; };
  d.potential_ = ScalarField::analytic([c](const Point& x) { return c.dot(x); }, [c](const Point&) { return c; },
                                       [n](const Point&) { return Mat(Mat::Zero(n, n)); });
  return d;
}

DriftField DriftField::gradient_of(const ManifoldModel& manifold, ScalarField potential) {
  const int n = manifold.dim();
  DriftField d;
  d.dim_ = n;
  if (manifold.kind() == ManifoldKind::euclidean) {
    d.field_ = [potential](const Point& x) { return potential.gradient(x); };
    d.jacobian_ = [potential](const Point& x) { return potential.hessian(x); };
  } else {
    d.field_ = [potential, manifold](const Point& x) {
      return Vec(manifold.inverse_metric_at(x) * potential.gradient(x));
    };
    const VectorFn field = d.field_;
    d.jacobian_ = [field](const Point& x) { return fd_jacobian(field, x, kJacobianStep); };
  }
  d.potential_ = std::move(potential);
  return d;
}

DriftField DriftField::from_expressions(const std::vector<Expression>& components) {
  const int n = static_cast<int>(components.size());
  for (const auto& c : components)
    if (c.dim() != n) throw InputError("drift component expression has wrong dimension");
  std::vector<Expression> partials;
  for (const auto& c : components)
    for (int i = 0; i < n; ++i) partials.push_back(c.derivative(i));
  return from_function(
      n,
      [components, n](const Point& x) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v(k) = components[static_cast<std::size_t>(k)].evaluate(x);
        return v;
      },
      [partials, n](const Point& x) {
        Mat J(n, n);
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i) J(k, i) = partials[static_cast<std::size_t>(k * n + i)].evaluate(x);
        return J;
      });
}

DriftField& DriftField::with_radial_sup_profile(ProfileFn profile) {
  profile_ = std::move(profile);
  return *this;
}

DriftField& DriftField::with_description(std::string text) {
  description_ = std::move(text);
  return *this;
}

}  // namespace vharm
