#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vharm/types.hpp"

namespace vharm {

/// Composite Simpson rule on [a,b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// Adaptive Simpson quadrature to an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Cumulative integrals F(t_k) = int_0^{t_k} g for samples g(t_k) on a uniform
/// grid t_k = k*step; fourth order at even nodes, third order at odd nodes.
std::vector<double> cumulative_integral(std::span<const double> samples, double step);

/// Central-difference gradient and Hessian with one Richardson extrapolation.
Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double h);
Mat fd_hessian(const std::function<double(const Point&)>& f, const Point& x, double h);
/// Jacobian J(k,i) = d F^k / d x^i.
Mat fd_jacobian(const std::function<Vec(const Point&)>& f, const Point& x, double h);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace vharm
