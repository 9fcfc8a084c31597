#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "vharm/types.hpp"

namespace vharm {

/// Small arithmetic expression over chart coordinates x1..xn and r2 = |x|^2,
/// with + - * / ^, unary minus and the functions log, exp, sqrt, sin, cos.
/// Expressions are immutable and can be differentiated symbolically.
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text, int dim);
  static Expression constant(double value, int dim);

  double evaluate(const Point& x) const;
  Expression derivative(int variable) const;

  int dim() const noexcept { return dim_; }
  /// Text the expression was parsed from (empty for derived expressions).
  const std::string& source() const noexcept { return source_; }
  std::string to_string() const;

 private:
  Expression(std::shared_ptr<const Node> root, int dim, std::string source);

  std::shared_ptr<const Node> root_;
  int dim_ = 0;
  std::string source_;
};

}  // namespace vharm
