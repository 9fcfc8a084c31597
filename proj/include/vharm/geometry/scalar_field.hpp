#pragma once

#include <functional>
#include <optional>

#include "vharm/expression.hpp"
#include "vharm/types.hpp"

namespace vharm {

/// Twice-differentiable function on a chart, with chart-coordinate first and
/// second derivatives (analytic, symbolic, or finite-difference backed).
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Vec(const Point&)>;
  using HessianFn = std::function<Mat(const Point&)>;

  static ScalarField analytic(ValueFn value, GradientFn gradient, HessianFn hessian);
  /// Derivatives by central differences with step h and one Richardson step.
  static ScalarField from_function(ValueFn value, double h = 1e-4);
  static ScalarField from_expression(const Expression& expr);
  static ScalarField constant(double c);

  double value(const Point& x) const { return value_(x); }
  /// Partial derivatives d_i f in the chart.
  Vec gradient(const Point& x) const { return gradient_(x); }
  /// Second partials d_i d_j f in the chart (not the covariant Hessian).
  Mat hessian(const Point& x) const { return hessian_(x); }

  const std::optional<Expression>& expression() const noexcept { return expression_; }

 private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::optional<Expression> expression_;
};

}  // namespace vharm
