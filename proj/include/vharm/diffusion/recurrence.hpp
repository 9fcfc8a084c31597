#pragma once

#include <string>
#include <vector>

#include "vharm/diffusion/engine.hpp"

namespace vharm {

/// Step control for hitting problems. The step shrinks near both spheres,
/// dt = clamp((accuracy d)^2 / 2, dt_min, ens.dt) with d the distance to the
/// nearer sphere, and a Brownian-bridge test catches crossings inside a step.
struct HittingOptions {
  double accuracy = 0.2;
  double dt_min = 1e-7;
  std::size_t max_steps = 10'000'000;
};

struct HittingEstimate {
  double a = 0.0;
  double b = 0.0;
  double r_start = 0.0;
  /// P(hit r = a before r = b), over uncensored paths.
  McEstimate probability;
  double censored_fraction = 0.0;
  double mean_steps = 0.0;
  std::vector<std::string> warnings;
  Status status = Status::pass;  // low_power when more than 1% of paths are censored
};

HittingEstimate recurrence_probe(const ManifoldModel& manifold, const DriftField& V, const Point& p, double a,
                                 double b, double r_start, const EnsembleSpec& ens, const HittingOptions& opts = {});

enum class RecurrenceClass { recurrent, transient, inconclusive };
std::string to_string(RecurrenceClass c);

/// Scan over a geometric sequence of outer radii. With y(b) = 1/(1 - P(b)),
/// proportional to the scale function S(b) - S(a) for radial diffusions,
/// recurrence means y diverges. Increments of y over successive ratios q are
/// compared: ratios above q^{-1/2} (flat R^2 gives 1) indicate recurrence,
/// ratios below (flat R^3 gives 1/q) transience.
struct RecurrenceScan {
  std::vector<HittingEstimate> estimates;
  std::vector<double> increment_ratios;
  RecurrenceClass classification = RecurrenceClass::inconclusive;
  /// P(b) strictly increasing across the scan, beyond 3 stderr.
  Status trend = Status::inconclusive;
};

RecurrenceScan recurrence_scan(const ManifoldModel& manifold, const DriftField& V, const Point& p, double a,
                               double r_start, const std::vector<double>& b_values, const EnsembleSpec& ens,
                               const HittingOptions& opts = {});

}  // namespace vharm
