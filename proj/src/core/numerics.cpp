#include "vharm/numerics.hpp"

#include <cmath>

#include "vharm/errors.hpp"
#include "vharm/stats.hpp"

namespace vharm {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::boundary: return "boundary";
    case Status::inconclusive: return "inconclusive";
    case Status::low_power: return "low-power";
  }
  return "fail";
}

bool accepted(Status s) { return s == Status::pass || s == Status::boundary; }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McEstimate estimate(std::span<const double> samples) {
  McEstimate e;
  e.n_samples = samples.size();
  if (samples.empty()) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(samples.size() - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return e;
}

Status one_sided_status(double margin, double stderr_, double abs_tol, double z) {
  if (!std::isfinite(margin)) return margin > 0 ? Status::pass : Status::fail;
  if (stderr_ <= 0.0) return margin >= -abs_tol ? Status::pass : Status::fail;
  if (margin >= z * stderr_) return Status::pass;
  if (margin >= -z * stderr_ - abs_tol) return Status::boundary;
  return Status::fail;
}

Status equality_status(double difference, double stderr_, double abs_tol, double z) {
  return std::abs(difference) <= z * stderr_ + abs_tol ? Status::pass : Status::fail;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

std::vector<double> cumulative_integral(std::span<const double> g, double step) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (k % 2 == 0) {
      out[k] = out[k - 2] + step / 3.0 * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
    } else if (k + 1 < g.size()) {
      // Half panel of the quadratic through (k-1, k, k+1).
      out[k] = out[k - 1] + step / 12.0 * (5.0 * g[k - 1] + 8.0 * g[k] - g[k + 1]);
    } else if (k >= 2) {
      out[k] = out[k - 1] + step / 12.0 * (-g[k - 2] + 8.0 * g[k - 1] + 5.0 * g[k]);
    } else {
      out[k] = out[k - 1] + 0.5 * step * (g[k - 1] + g[k]);
    }
  }
  return out;
}

namespace {

Vec central_gradient(const std::function<double(const Point&)>& f, const Point& x, double h) {
  Vec g(x.size());
  Point y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y(i) = x(i) + h;
    const double fp = f(y);
    y(i) = x(i) - h;
    const double fm = f(y);
    y(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat central_hessian(const std::function<double(const Point&)>& f, const Point& x, double h) {
  const Eigen::Index n = x.size();
  Mat H(n, n);
  Point y = x;
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = x(i) + h;
    const double fp = f(y);
    y(i) = x(i) - h;
    const double fm = f(y);
    y(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      y(i) = x(i) + h; y(j) = x(j) + h; const double fpp = f(y);
      y(j) = x(j) - h; const double fpm = f(y);
      y(i) = x(i) - h; const double fmm = f(y);
      y(j) = x(j) + h; const double fmp = f(y);
      y(i) = x(i); y(j) = x(j);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace

Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double h) {
  return (4.0 * central_gradient(f, x, 0.5 * h) - central_gradient(f, x, h)) / 3.0;
}

Mat fd_hessian(const std::function<double(const Point&)>& f, const Point& x, double h) {
  return (4.0 * central_hessian(f, x, 0.5 * h) - central_hessian(f, x, h)) / 3.0;
}

Mat fd_jacobian(const std::function<Vec(const Point&)>& F, const Point& x, double h) {
  const Eigen::Index n = x.size();
  const Vec f0 = F(x);
  Mat J(f0.size(), n);
  Point y = x;
  auto column = [&](Eigen::Index i, double step) {
    y(i) = x(i) + step;
    const Vec fp = F(y);
    y(i) = x(i) - step;
    const Vec fm = F(y);
    y(i) = x(i);
    return Vec((fp - fm) / (2.0 * step));
  };
  for (Eigen::Index i = 0; i < n; ++i) J.col(i) = (4.0 * column(i, 0.5 * h) - column(i, h)) / 3.0;
  return J;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("line fit with degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace vharm
