#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vharm/report/config.hpp"
#include "vharm/report/verdict.hpp"

namespace vharm {

/// Everything a check needs besides its own parameters.
struct CheckContext {
  const ExperimentConfig& config;
  ManifoldModel manifold;
  DriftField drift;
  EffectiveDimension m;
  std::optional<ManifoldModel> target;
  /// Experiment seed mixed with a hash of the check id, so adding or
  /// reordering checks leaves every other check's streams unchanged.
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

using CheckRunner = std::function<std::vector<Verdict>(const CheckContext&, const CheckSpec&)>;

struct CheckInfo {
  std::string id;
  std::string module;  // geometry, comparison, diffusion, bochner, harmonic
  /// Anchor into the statement index of the documentation.
  std::string anchor;
  std::string summary;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  CheckRunner run;
};

/// All registered checks, sorted by id.
const std::vector<CheckInfo>& registry();
const CheckInfo* find_check(std::string_view id);
/// Checks of one module (all when empty); unknown modules give an empty list.
std::vector<const CheckInfo*> list_checks(std::string_view module = {});

/// FNV-1a, used to derive per-check seeds.
std::uint64_t stable_hash(std::string_view text);

}  // namespace vharm
