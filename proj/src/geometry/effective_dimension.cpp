#include "vharm/geometry/effective_dimension.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "vharm/errors.hpp"

namespace vharm {

EffectiveDimension EffectiveDimension::finite(double m) {
  if (!std::isfinite(m)) throw InvalidConfigurationError("finite effective dimension must be a finite number");
  return {Kind::finite, m};
}

EffectiveDimension EffectiveDimension::plus_infinity() { return {Kind::plus_infinity, 0.0}; }
EffectiveDimension EffectiveDimension::minus_infinity() { return {Kind::minus_infinity, 0.0}; }

EffectiveDimension EffectiveDimension::parse(const std::string& text) {
  if (text == "inf" || text == "+inf") return plus_infinity();
  if (text == "-inf") return minus_infinity();
  char* end = nullptr;
  const double m = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw InputError("cannot parse effective dimension '" + text + "'");
  return finite(m);
}

double EffectiveDimension::value() const {
  if (is_infinite()) throw InvalidConfigurationError("effective dimension is infinite");
  return value_;
}

void EffectiveDimension::validate_for(int n) const {
  if (kind_ == Kind::finite && value_ > 1.0 && value_ < n)
    throw InvalidConfigurationError("effective dimension m=" + to_string() + " lies in (1, n) for n=" +
                                    std::to_string(n));
}

double EffectiveDimension::correction_coefficient(int n) const {
  if (is_infinite()) return 0.0;
  if (value_ == n) throw InvalidConfigurationError("m = n has no correction coefficient; V must vanish");
  return 1.0 / (value_ - n);
}

std::string EffectiveDimension::to_string() const {
  switch (kind_) {
    case Kind::plus_infinity: return "inf";
    case Kind::minus_infinity: return "-inf";
    case Kind::finite: break;
  }
  std::ostringstream s;
  s.precision(17);
  s << value_;
  return s.str();
}

}  // namespace vharm
