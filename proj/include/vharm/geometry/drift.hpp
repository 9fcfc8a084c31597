#pragma once

#include <functional>
#include <optional>
#include <string>

#include "vharm/geometry/manifold.hpp"
#include "vharm/geometry/scalar_field.hpp"
#include "vharm/types.hpp"

namespace vharm {

/// The drift V in chart components V^k, with its chart Jacobian d_i V^k and,
/// when V = grad f, the potential f.
class DriftField {
 public:
  using VectorFn = std::function<Vec(const Point&)>;
  using JacobianFn = std::function<Mat(const Point&)>;
  using ProfileFn = std::function<double(double)>;

  static DriftField zero(int n);
  /// Jacobian falls back to finite differences when not supplied.
  static DriftField from_function(int n, VectorFn field, JacobianFn jacobian = {});
  static DriftField constant(const Vec& c);
  /// V = grad_g f = g^{-1} df on the given manifold.
  static DriftField gradient_of(const ManifoldModel& manifold, ScalarField potential);
  /// V^k given by one expression per component.
  static DriftField from_expressions(const std::vector<Expression>& components);

  int dim() const noexcept { return dim_; }
  Vec at(const Point& x) const { return field_(x); }
  /// J(k, i) = d_i V^k.
  Mat jacobian(const Point& x) const { return jacobian_(x); }
  bool identically_zero() const noexcept { return zero_; }
  const std::optional<ScalarField>& potential() const noexcept { return potential_; }

  /// Analytic v(r) = sup_{B_r(p)} |V| about the chart origin, when known.
  const ProfileFn& radial_sup_profile() const noexcept { return profile_; }
  DriftField& with_radial_sup_profile(ProfileFn profile);

  /// Free-form description kept for reports and config round trips.
  const std::string& description() const noexcept { return description_; }
  DriftField& with_description(std::string text);

 private:
  int dim_ = 0;
  VectorFn field_;
  JacobianFn jacobian_;
  bool zero_ = false;
  std::optional<ScalarField> potential_;
  ProfileFn profile_;
  std::string description_;
};

}  // namespace vharm
