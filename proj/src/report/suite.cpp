#include "vharm/report/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "vharm/errors.hpp"
#include "vharm/report/registry.hpp"

namespace vharm {

namespace {

nlohmann::ordered_json number(double x) {
  if (std::isfinite(x)) return x + 0.0;  // drops negative zero
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

std::size_t SuiteResult::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [s](const Verdict& v) { return v.status == s; }));
}

int SuiteResult::exit_code() const { return count(Status::fail) == 0 ? 0 : 1; }

SuiteResult run_suite(const ExperimentConfig& config) {
  SuiteResult result{config.experiment_id, config.seed, {}};
  const ManifoldModel manifold = config.manifold.build();
  const DriftField drift = config.drift.build(manifold);
  std::optional<ManifoldModel> target;
  if (config.target) target = config.target->build();
  for (const CheckSpec& check : config.checks) {
    const CheckInfo* info = find_check(check.check_name());
    const std::string anchor = info ? info->anchor : std::string{};
    if (!info) {
      result.verdicts.push_back(error_verdict(check.id, anchor, "unknown check"));
      continue;
    }
    CheckContext ctx{config, manifold, drift, config.effective_dimension(), target,
                     config.seed ^ stable_hash(check.id), config.threads};
    try {
      auto verdicts = info->run(ctx, check);
      if (verdicts.empty()) verdicts.push_back(error_verdict(check.id, anchor, "check produced no verdict"));
      for (auto& v : verdicts) {
        v.check_id = check.id;
        if (v.anchor.empty()) v.anchor = anchor;
        result.verdicts.push_back(std::move(v));
      }
    } catch (const std::exception& e) {
      result.verdicts.push_back(error_verdict(check.id, anchor, e.what()));
    }
  }
  return result;
}

std::string summary_json(const SuiteResult& result) {
  nlohmann::ordered_json j;
  j["experiment_id"] = result.experiment_id;
  j["seed"] = result.seed;
  nlohmann::ordered_json counts;
  for (Status s : {Status::pass, Status::fail, Status::boundary, Status::inconclusive, Status::low_power})
    counts[std::string(to_string(s))] = result.count(s);
  j["counts"] = counts;
  j["exit_code"] = result.exit_code();
  auto& arr = j["verdicts"] = nlohmann::ordered_json::array();
  for (const Verdict& v : result.verdicts) {
    arr.push_back({{"check_id", v.check_id},
                   {"label", v.label},
                   {"status", std::string(to_string(v.status))},
                   {"lhs", number(v.lhs)},
                   {"rhs", number(v.rhs)},
                   {"margin", number(v.margin)},
                   {"stderr", number(v.stderr_)},
                   {"tolerance", number(v.tolerance)},
                   {"anchor", v.anchor},
                   {"reason", v.reason}});
  }
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_artifacts(const SuiteResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<Verdict> sorted = result.verdicts;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Verdict& a, const Verdict& b) { return a.check_id < b.check_id; });
  const auto csv_path = dir / "verdicts.csv";
  const auto json_path = dir / "summary.json";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + csv_path.string());
    write_verdict_csv(out, sorted);
  }
  {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + json_path.string());
    out << summary_json(result);
  }
  return {csv_path, json_path};
}

}  // namespace vharm
