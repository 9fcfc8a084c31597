#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vharm/comparison/comparison.hpp"

namespace vharm {

enum class ConditionId { A1, A2, A3, B1, B2, B3 };
std::string to_string(ConditionId id);
ConditionId parse_condition(const std::string& text);

struct ConditionReport {
  ConditionId id = ConditionId::A1;
  bool holds = false;
  double witness = 1.0;                                 // D >= 1
  std::vector<std::pair<double, double>> violations;    // (radius, measured value)
  std::string note;                                     // which variant or path held
  bool starred_holds = false;                           // A_i* variant verdict
};

struct AuditRow {
  ConditionId id = ConditionId::A1;
  double radius = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double witness = 1.0;
  bool pass = false;
};

struct AuditOptions {
  double r0 = 0.25;
  /// Geometric sub-samples per doubling used for the sup over radii.
  int subsamples = 8;
  /// A witness is accepted when the constant required over the outermost
  /// doubling exceeds the one required inside it by at most this fraction.
  double stabilization = 0.05;
};

struct AuditResult {
  std::vector<ConditionReport> reports;
  std::vector<AuditRow> rows;

  const ConditionReport* find(ConditionId id) const;
};

AuditResult audit_conditions(const ComparisonInput& input, const RadialFrame& frame,
                             const std::vector<ConditionId>& which, const AuditOptions& options = {});

/// Counterexamples to "A_i holds and Ric_V^m >= 0 imply B_i holds".
std::vector<std::string> implication_counterexamples(const AuditResult& audit, bool ricci_nonnegative);

void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows);

/// v(r) = sup of |V|_g over B_r(p), sampled along the frame rays (or the
/// drift's analytic profile when p is the chart origin).
std::vector<double> radial_sup_profile(const ComparisonInput& input, const RadialFrame& frame,
                                       const std::vector<double>& radii);

}  // namespace vharm
