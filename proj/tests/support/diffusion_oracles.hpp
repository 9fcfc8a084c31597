#pragma once

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

namespace vharm::oracle {

/// P(hit |x| = a before |x| = b) for Brownian motion in R^n started at |x| = r.
inline double flat_annulus_probability(int n, double a, double b, double r) {
  if (n == 2) return (std::log(b) - std::log(r)) / (std::log(b) - std::log(a));
  auto s = [n](double t) { return -std::pow(t, 2.0 - n); };
  return (s(b) - s(r)) / (s(b) - s(a));
}

/// Same probability for the radial process of Delta - <grad log(1+|x|^2), grad>
/// on R^2: its scale function is S(r) = log r + r^2/2.
inline double log_potential_annulus_probability(double a, double b, double r) {
  auto S = [](double t) { return std::log(t) + 0.5 * t * t; };
  return (S(b) - S(r)) / (S(b) - S(a));
}

/// E|X_t| for X_t = x0 + sqrt(2) W_t in R^n with |x0| = r0: a scaled
/// noncentral chi variable, E = sqrt(4t) Gamma((n+1)/2)/Gamma(n/2) 1F1(-1/2; n/2; -lambda^2/2),
/// lambda = r0 / sqrt(2t).
inline double bessel_mean(int n, double r0, double t) {
  const double sigma = std::sqrt(2.0 * t);
  const double lambda = r0 / sigma;
  const double k = n;
  return sigma * std::sqrt(2.0) * boost::math::tgamma_ratio((k + 1) / 2, k / 2) *
         boost::math::hypergeometric_1F1(-0.5, k / 2, -lambda * lambda / 2);
}

/// E|X_K|^2 for the Euler scheme X_{k+1} = (1 - dt) X_k + sqrt(2) dW_k in R^n.
inline double euler_ou_second_moment(int n, double r0, double t, double dt) {
  const double K = std::round(t / dt);
  const double c = (1 - dt) * (1 - dt);
  return std::pow(c, K) * r0 * r0 + 2.0 * n * dt * (1 - std::pow(c, K)) / (1 - c);
}

}  // namespace vharm::oracle
