#include "vharm/geometry/scalar_field.hpp"

#include <vector>

#include "vharm/numerics.hpp"

namespace vharm {

ScalarField ScalarField::analytic(ValueFn value, GradientFn gradient, HessianFn hessian) {
  ScalarField f;
  f.value_ = std::move(value);
  f.gradient_ = std::move(gradient);
  f.hessian_ = std::move(hessian);
  return f;
}

ScalarField ScalarField::from_function(ValueFn value, double h) {
  ScalarField f;
  f.value_ = value;
  f.gradient_ = [value, h](const Point& x) { return fd_gradient(value, x, h); };
  f.hessian_ = [value, h](const Point& x) { return fd_hessian(value, x, h); };
  return f;
}

ScalarField ScalarField::from_expression(const Expression& expr) {
  const int n = expr.dim();
  std::vector<Expression> first;
  std::vector<Expression> second;
  for (int i = 0; i < n; ++i) first.push_back(expr.derivative(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) second.push_back(first[static_cast<std::size_t>(i)].derivative(j));
  ScalarField f;
  f.value_ = [expr](const Point& x) { return expr.evaluate(x); };
  f.gradient_ = [first, n](const Point& x) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g(i) = first[static_cast<std::size_t>(i)].evaluate(x);
    return g;
  };
  f.hessian_ = [second, n](const Point& x) {
    Mat H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = second[static_cast<std::size_t>(i * n + j)].evaluate(x);
    return H;
  };
  f.expression_ = expr;
  return f;
}

ScalarField ScalarField::constant(double c) {
  return analytic([c](const Point&) { return c; }, [](const Point& x) { return Vec(Vec::Zero(x.size())); },
                  [](const Point& x) { return Mat(Mat::Zero(x.size(), x.size())); });
}

}  // namespace vharm
