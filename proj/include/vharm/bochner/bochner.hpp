#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vharm/bochner/map_spec.hpp"
#include "vharm/geometry/drift.hpp"
#include "vharm/geometry/effective_dimension.hpp"
#include "vharm/geometry/scalar_field.hpp"
#include "vharm/stats.hpp"

namespace vharm {

struct Differential {
  Mat chart;    // d_i u^a
  Mat framed;   // du(e_i) in orthonormal frames of g at x and h at u(x)
  double norm2 = 0.0;
};

Differential map_differential(const SmoothMapSpec& u, const Point& x);

/// Second fundamental form Hess u(d_i, d_j)^a in chart components.
std::array<Mat, kMaxDim> map_hessian(const SmoothMapSpec& u, const MapJet& jet, const Point& x);

/// Chart components of tau_V(u) = tau(u) - du(V).
Vec tension_field(const SmoothMapSpec& u, const DriftField& V, const Point& x);

/// Steps of the outer finite differences for third-order quantities.
struct BochnerOptions {
  double h = 1e-3;
  bool richardson = true;
};

/// Both sides of the Bochner identity; residual = lhs - (hessian + tension + ricci - curvature).
struct BochnerTerms {
  double lhs = 0.0;        // 1/2 Delta_V |du|^2
  double hessian = 0.0;    // |Hess u|^2
  double tension = 0.0;    // sum <du(e_i), nabla_{e_i} tau_V(u)>
  double ricci = 0.0;      // sum Ric_V^infty(e_i, e_j) <du(e_i), du(e_j)>
  double curvature = 0.0;  // sum <R^N(du e_i, du e_j) du e_j, du e_i>
  double residual = 0.0;
};

BochnerTerms bochner_terms(const SmoothMapSpec& u, const DriftField& V, const Point& x,
                           const BochnerOptions& opts = {});
double bochner_residual(const SmoothMapSpec& u, const DriftField& V, const Point& x, const BochnerOptions& opts = {});

/// Scalar-target quantities: lhs = 1/2 Delta_V |grad u|^2 and the pieces of the
/// scalar Bochner formula and its inequalities.
struct ScalarBochnerTerms {
  double lhs = 0.0;
  double hessian = 0.0;           // |Hess u|^2
  double gradient_of_laplacian = 0.0;  // <grad Delta_V u, grad u>
  double ricci_infinity = 0.0;    // Ric_V^infty(grad u, grad u)
  double ricci_m = 0.0;           // Ric_V^m(grad u, grad u)
  double laplacian_V = 0.0;       // Delta_V u
  double drift_derivative = 0.0;  // <V, grad u>
  double residual = 0.0;          // lhs - (hessian + gradient_of_laplacian + ricci_infinity)
};

ScalarBochnerTerms scalar_bochner(const ManifoldModel& manifold, const DriftField& V, const ScalarField& u,
                                  const EffectiveDimension& m, const Point& x, const BochnerOptions& opts = {});

/// Right-hand sides of the two scalar Bochner inequalities:
/// (Delta_V u)^2/n + 2 Delta_V u <V, grad u>/n + <grad Delta_V u, grad u> + Ric_V^m(grad u, grad u)
/// for m in [-inf, 0] u [n, inf], and
/// Ric_V^m(grad u, grad u) + (Delta_V u)^2/m + <grad Delta_V u, grad u> for m in [-inf, 0) u (n, inf].
double scalar_bochner_rhs(const ScalarBochnerTerms& t, int n, const EffectiveDimension& m);
double scalar_bochner_rhs_negative_m(const ScalarBochnerTerms& t, int n, const EffectiveDimension& m);

/// h[i][j] is a vector of a finite-dimensional Hilbert space.
using HilbertArray = std::vector<std::vector<Eigen::VectorXd>>;

struct HilbertTraceResult {
  double lhs = 0.0;  // sum ||h_ij||^2
  double rhs = 0.0;  // ||sum h_ii||^2 / (n - k)
  bool pass = false;
};

/// With null_multiplicity k the kernel of (h_ij) must have dimension >= k.
HilbertTraceResult hilbert_trace_check(const HilbertArray& h, std::optional<int> null_multiplicity = {});

struct BochnerRow {
  std::string check_id;
  Point point;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct BochnerReport {
  std::vector<BochnerRow> rows;
  bool pass() const;
  double min_margin() const;
};

/// CSV columns: check_id,point,lhs,rhs,margin,pass.
void write_bochner_csv(std::ostream& out, const std::vector<BochnerRow>& rows, bool header = true);

/// Coefficient 2m/(n(m-n)) of |du(V)|^2 (2/n at m = +-inf).
double bochner_coefficient(const EffectiveDimension& m, int n);

struct HarmonicPreconditions {
  double tension_tolerance = 1e-6;
  double ricci_tolerance = 1e-8;
};

/// Delta_V |du|^2 >= 2m/(n(m-n)) |du(V)|^2 at each point, tolerance 1e-4.
BochnerReport bochner_lower_bound_check(const SmoothMapSpec& u, const DriftField& V, const EffectiveDimension& m,
                                        const std::vector<Point>& points, const HarmonicPreconditions& pre = {},
                                        const BochnerOptions& opts = {});

/// Delta_V d_N^2(u, o) >= 2 |du|^2 - 1e-4 for maps into Hadamard model targets.
BochnerReport distance_laplacian_check(const SmoothMapSpec& u, const DriftField& V, const Point& o,
                                       const std::vector<Point>& points, const HarmonicPreconditions& pre = {},
                                       const BochnerOptions& opts = {});

}  // namespace vharm
