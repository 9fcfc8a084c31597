#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace vharm {

/// One-sided slack used by every statistical verdict.
inline constexpr double kSlackZ = 3.0;

enum class Status { pass, fail, boundary, inconclusive, low_power };

std::string_view to_string(Status s);
/// pass and boundary both count as "not refuted".
bool accepted(Status s);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  double confidence = 0.99;
};

/// Mean and standard error with pairwise (fixed tree order) summation, so the
/// result depends only on the sample order, not on how samples were produced.
McEstimate estimate(std::span<const double> samples);

double pairwise_sum(std::span<const double> values);

/// Verdict for a claimed inequality lhs <= rhs, given margin = rhs - lhs.
/// Deterministic quantities (stderr == 0) pass when margin >= -abs_tol.
/// Statistical ones pass when margin >= z*stderr, are "boundary" when the
/// inequality is within z*stderr of equality, and fail otherwise.
Status one_sided_status(double margin, double stderr_, double abs_tol = 0.0, double z = kSlackZ);

/// Verdict for a claimed equality: pass when |difference| <= z*stderr + abs_tol.
Status equality_status(double difference, double stderr_, double abs_tol = 0.0, double z = kSlackZ);

}  // namespace vharm
