#pragma once

#include <string>

namespace vharm {

/// The effective dimension m in [-inf, 1] U [n, +inf]; the infinite values are
/// symbolic so the correction term V*(x)V*/(m-n) vanishes exactly.
class EffectiveDimension {
 public:
  static EffectiveDimension finite(double m);
  static EffectiveDimension plus_infinity();
  static EffectiveDimension minus_infinity();
  /// Accepts a number, "inf", "+inf" or "-inf".
  static EffectiveDimension parse(const std::string& text);

  bool is_infinite() const noexcept { return kind_ != Kind::finite; }
  bool is_plus_infinity() const noexcept { return kind_ == Kind::plus_infinity; }
  bool is_minus_infinity() const noexcept { return kind_ == Kind::minus_infinity; }
  /// Throws InvalidConfigurationError for infinite values.
  double value() const;

  /// Throws InvalidConfigurationError when m lies in (1, n).
  void validate_for(int n) const;
  bool equals_dimension(int n) const noexcept { return kind_ == Kind::finite && value_ == n; }
  /// Coefficient 1/(m-n) of the correction term; exactly 0 at m = +-inf.
  /// Throws InvalidConfigurationError at m = n.
  double correction_coefficient(int n) const;

  std::string to_string() const;
  bool operator==(const EffectiveDimension&) const = default;

 private:
  enum class Kind { finite, plus_infinity, minus_infinity };
  EffectiveDimension(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

}  // namespace vharm
