#include "vharm/report/verdict.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace vharm {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double Verdict::slack() const { return kSlackZ * stderr_ + tolerance; }

bool Verdict::consistent() const { return status != Status::pass || margin >= -slack(); }

Verdict make_verdict(std::string check_id, std::string label, Claim claim, double lhs, double rhs, double stderr_,
                     double tolerance, std::string anchor) {
  Verdict v;
  v.check_id = std::move(check_id);
  v.label = std::move(label);
  v.lhs = lhs;
  v.rhs = rhs;
  v.stderr_ = stderr_;
  v.tolerance = tolerance;
  v.anchor = std::move(anchor);
  switch (claim) {
    case Claim::at_most: v.margin = rhs - lhs; break;
    case Claim::at_least: v.margin = lhs - rhs; break;
    case Claim::equal: v.margin = -std::abs(lhs - rhs); break;
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    v.status = Status::fail;
    v.reason = "non-finite value";
  } else if (claim == Claim::equal) {
    v.status = equality_status(lhs - rhs, stderr_, tolerance);
  } else {
    v.status = one_sided_status(v.margin, stderr_, tolerance);
  }
  return v;
}

Verdict status_verdict(std::string check_id, std::string label, Status status, double lhs, double rhs,
                       std::string anchor, std::string reason) {
  Verdict v;
  v.check_id = std::move(check_id);
  v.label = std::move(label);
  v.status = status;
  v.lhs = lhs;
  v.rhs = rhs;
  v.margin = 0.0;
  v.anchor = std::move(anchor);
  v.reason = std::move(reason);
  return v;
}

Verdict error_verdict(std::string check_id, std::string anchor, const std::string& message) {
  Verdict v;
  v.check_id = std::move(check_id);
  v.label = "error";
  v.status = Status::fail;
  v.anchor = std::move(anchor);
  v.reason = message;
  return v;
}

void write_verdict_csv(std::ostream& out, const std::vector<Verdict>& verdicts) {
  out << "check_id,label,status,lhs,rhs,margin,stderr,tolerance,anchor,reason\n";
  for (const Verdict& v : verdicts) {
    out << fmt::format("{},{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{},{}\n", csv_field(v.check_id),
                       csv_field(v.label), to_string(v.status), v.lhs + 0.0, v.rhs + 0.0, v.margin + 0.0, v.stderr_, v.tolerance,
                       csv_field(v.anchor), csv_field(v.reason));
  }
}

}  // namespace vharm
