#pragma once

// Independent finite-difference geometry used only as a test oracle: every
// quantity is rebuilt from metric_at() alone by central differences with one
// Richardson extrapolation step.

#include <array>
#include <functional>
#include <vector>

#include "vharm/geometry/manifold.hpp"

namespace vharm::oracle {

using MetricFn = std::function<Mat(const Point&)>;

inline Mat richardson_matrix(const std::function<Mat(double)>& central, double h) {
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// dg[k] = d_k g
inline std::vector<Mat> metric_derivatives(const MetricFn& g, const Point& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  std::vector<Mat> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(richardson_matrix(
        [&](double s) {
          Point a = x, b = x;
          a(k) += s;
          b(k) -= s;
          return Mat((g(a) - g(b)) / (2.0 * s));
        },
        h));
  }
  return out;
}

/// gamma[k](i,j) = Gamma^k_ij
inline std::vector<Mat> christoffel(const MetricFn& g, const Point& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  const auto dg = metric_derivatives(g, x, h);
  const Mat ginv = g(x).inverse();
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = s;
      }
  return gamma;
}

inline Mat ricci(const MetricFn& g, const Point& x, double h = 1e-3) {
  const int n = static_cast<int>(x.size());
  const auto gamma = christoffel(g, x);
  // dgamma[l][k](i,j) = d_l Gamma^k_ij
  std::vector<std::vector<Mat>> dgamma(n);
  for (int l = 0; l < n; ++l) {
    auto central = [&](double s) {
      Point a = x, b = x;
      a(l) += s;
      b(l) -= s;
      const auto ga = christoffel(g, a);
      const auto gb = christoffel(g, b);
      std::vector<Mat> d(n);
      for (int k = 0; k < n; ++k) d[k] = (ga[k] - gb[k]) / (2.0 * s);
      return d;
    };
    const auto fine = central(0.5 * h);
    const auto coarse = central(h);
    for (int k = 0; k < n; ++k) dgamma[l].push_back((4.0 * fine[k] - coarse[k]) / 3.0);
  }
  Mat R = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) {
        s += dgamma[k][k](i, j) - dgamma[j][k](i, k);
        for (int l = 0; l < n; ++l) s += gamma[k](k, l) * gamma[l](i, j) - gamma[k](j, l) * gamma[l](i, k);
      }
      R(i, j) = s;
    }
  return R;
}

inline double scalar(const std::function<double(const Point&)>& f, const Point& x) { return f(x); }

inline Vec gradient(const std::function<double(const Point&)>& f, const Point& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    auto central = [&](double s) {
      Point a = x, b = x;
      a(i) += s;
      b(i) -= s;
      return (f(a) - f(b)) / (2.0 * s);
    };
    out(i) = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return out;
}

inline Mat second_partials(const std::function<double(const Point&)>& f, const Point& x, double h = 1e-3) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto central = [&](double s) {
        auto at = [&](double si, double sj) {
          Point y = x;
          y(i) += si;
          y(j) += sj;
          return f(y);
        };
        return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
      };
      H(i, j) = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }
  return H;
}

/// Laplace-Beltrami from the divergence form (1/sqrt|g|) d_i (sqrt|g| g^{ij} d_j f).
inline double laplace_beltrami(const MetricFn& g, const std::function<double(const Point&)>& f, const Point& x,
                               double h = 1e-3) {
  const int n = static_cast<int>(x.size());
  auto flux = [&](const Point& y, int i) {
    const Mat gy = g(y);
    const Vec df = gradient(f, y, 1e-4);
    return std::sqrt(gy.determinant()) * (gy.inverse() * df)(i);
  };
  double s = 0;
  for (int i = 0; i < n; ++i) {
    auto central = [&](double t) {
      Point a = x, b = x;
      a(i) += t;
      b(i) -= t;
      return (flux(a, i) - flux(b, i)) / (2.0 * t);
    };
    s += (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return s / std::sqrt(g(x).determinant());
}

}  // namespace vharm::oracle
