#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vharm/geometry/drift.hpp"
#include "vharm/geometry/effective_dimension.hpp"
#include "vharm/geometry/manifold.hpp"
#include "vharm/keyvalue.hpp"

namespace vharm {

/// [manifold] and [target] sections.
struct ModelSpec {
  std::string kind;  // euclidean, hyperbolic, sphere, rotationally_symmetric
  int dim = 0;
  std::optional<double> kappa;
  std::optional<std::string> warp;  // flat, hyperbolic, spherical, cubic
  std::optional<double> warp_param;

  ManifoldModel build() const;
  bool operator==(const ModelSpec&) const = default;
};

/// [drift] section: zero, gradient (potential), constant (vector) or field
/// (components separated by ';').
struct DriftSpec {
  std::string kind;
  std::string potential;
  std::vector<double> vector;
  std::string components;

  DriftField build(const ManifoldModel& manifold) const;
  bool operator==(const DriftSpec&) const = default;
};

/// One [check <id>] section; id is a registered check name optionally followed
/// by ":<tag>" so a check can appear several times.
struct CheckSpec {
  std::string id;
  KeyValueSection params;

  /// Registered name: id up to the first ':'.
  std::string check_name() const;
  bool operator==(const CheckSpec& other) const;
};

/// A validated experiment. Seeds and Monte-Carlo path counts have no defaults.
struct ExperimentConfig {
  std::string experiment_id;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  ModelSpec manifold;
  DriftSpec drift;
  std::string m = "inf";
  double kappa = 0.0;  // lower curvature constant used by comparison checks
  std::optional<double> c_p;
  std::optional<ModelSpec> target;
  std::vector<CheckSpec> checks;

  /// Parses and validates; errors carry the line and field.
  static ExperimentConfig parse(const KeyValueDocument& doc);
  static ExperimentConfig parse_string(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  KeyValueDocument to_document() const;
  std::string to_string() const;

  EffectiveDimension effective_dimension() const { return EffectiveDimension::parse(m); }
  bool operator==(const ExperimentConfig& other) const;
};

/// Splits on a separator and trims the pieces.
std::vector<std::string> split_list(const std::string& text, char separator);

}  // namespace vharm
