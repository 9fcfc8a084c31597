#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vharm/report/config.hpp"
#include "vharm/report/verdict.hpp"

namespace vharm {

struct SuiteResult {
  std::string experiment_id;
  std::uint64_t seed = 0;
  /// Verdicts in declared check order.
  std::vector<Verdict> verdicts;

  std::size_t count(Status s) const;
  /// 0 iff no verdict failed.
  int exit_code() const;
};

/// Runs the checks in declared order; a check that throws yields one fail
/// verdict carrying the error message.
SuiteResult run_suite(const ExperimentConfig& config);

/// Full verdict set as JSON (stable key order, no timestamps).
std::string summary_json(const SuiteResult& result);

/// Writes verdicts.csv (rows ordered by check_id, stable within a check) and
/// summary.json into dir; returns the written paths.
std::vector<std::filesystem::path> write_artifacts(const SuiteResult& result, const std::filesystem::path& dir);

}  // namespace vharm
