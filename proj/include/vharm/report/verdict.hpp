#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vharm/stats.hpp"

namespace vharm {

/// Outcome of one claim. margin is positive when the claim holds with room to
/// spare: rhs - lhs for lhs <= rhs, lhs - rhs for lhs >= rhs, and -|lhs - rhs|
/// for equalities.
struct Verdict {
  std::string check_id;
  std::string label;
  Status status = Status::inconclusive;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double stderr_ = 0.0;
  /// Absolute tolerance granted next to the statistical slack.
  double tolerance = 0.0;
  std::string anchor;
  std::string reason;

  /// Slack z * stderr + tolerance used by the verdict policy.
  double slack() const;
  /// status == pass implies margin >= -slack.
  bool consistent() const;
};

enum class Claim { at_most, at_least, equal };

/// Verdict for lhs <= rhs, lhs >= rhs or lhs == rhs under the shared policy
/// (one_sided_status / equality_status with z = 3).
Verdict make_verdict(std::string check_id, std::string label, Claim claim, double lhs, double rhs, double stderr_,
                     double tolerance, std::string anchor);

/// Verdict whose status is decided elsewhere (trend tests, classifications).
Verdict status_verdict(std::string check_id, std::string label, Status status, double lhs, double rhs,
                       std::string anchor, std::string reason = {});

/// A check that threw: recorded as fail with the message.
Verdict error_verdict(std::string check_id, std::string anchor, const std::string& message);

/// CSV columns: check_id,label,status,lhs,rhs,margin,stderr,tolerance,anchor,reason.
void write_verdict_csv(std::ostream& out, const std::vector<Verdict>& verdicts);

}  // namespace vharm
