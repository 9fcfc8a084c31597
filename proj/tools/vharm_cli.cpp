#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vharm/comparison/audit.hpp"
#include "vharm/diffusion/engine.hpp"
#include "vharm/errors.hpp"
#include "vharm/report/registry.hpp"
#include "vharm/report/suite.hpp"

namespace {

using namespace vharm;

int run(const std::string& path, const std::string& out_dir) {
  const auto config = ExperimentConfig::load(path);
  const auto result = run_suite(config);
  for (const auto& v : result.verdicts) {
    std::cout << fmt::format("{:<13} {:<28} {}", to_string(v.status), v.check_id, v.label);
    if (!v.reason.empty()) std::cout << "  (" << v.reason << ")";
    std::cout << "\n";
  }
  std::cout << fmt::format("{}: {} pass, {} fail, {} boundary, {} inconclusive, {} low_power\n", result.experiment_id,
                           result.count(Status::pass), result.count(Status::fail), result.count(Status::boundary),
                           result.count(Status::inconclusive), result.count(Status::low_power));
  if (!out_dir.empty())
    for (const auto& p : write_artifacts(result, out_dir)) std::cout << "wrote " << p.string() << "\n";
  return result.exit_code();
}

int list(const std::string& module) {
  for (const CheckInfo* c : list_checks(module))
    std::cout << fmt::format("{:<24} {:<11} #{:<34} {}\n", c->id, c->module, c->anchor, c->summary);
  return 0;
}

int audit(const std::string& path, double max_radius, int directions, const std::string& csv) {
  const auto config = ExperimentConfig::load(path);
  const auto manifold = config.manifold.build();
  const auto in = ComparisonInput::make(manifold, config.drift.build(manifold), config.effective_dimension(),
                                        config.kappa, Point(Vec::Zero(manifold.dim())), config.c_p);
  const auto frame = RadialFrame::uniform(manifold, in.base, directions, max_radius);
  const auto result = audit_conditions(in, frame,
                                       {ConditionId::A1, ConditionId::A2, ConditionId::A3, ConditionId::B1,
                                        ConditionId::B2, ConditionId::B3});
  for (const auto& r : result.reports) {
    std::cout << fmt::format("{:<3} {:<5} D={:<10.6g} violations={:<4} {}\n", to_string(r.id),
                             r.holds ? "holds" : "fails", r.witness, r.violations.size(), r.note);
  }
  const auto ce = implication_counterexamples(result, true);
  for (const auto& s : ce) std::cout << "counterexample: " << s << "\n";
  if (!csv.empty()) {
    std::ofstream out(csv);
    write_audit_csv(out, result.rows);
  }
  return 0;
}

int simulate(const std::string& path, std::size_t paths, double dt, double t, std::optional<std::uint64_t> seed,
             const std::vector<double>& x0_list, const std::string& csv) {
  const auto config = ExperimentConfig::load(path);
  const auto manifold = config.manifold.build();
  const auto drift = config.drift.build(manifold);
  const int n = manifold.dim();
  Point x0 = Point(Vec::Zero(n));
  if (!x0_list.empty()) {
    if (static_cast<int>(x0_list.size()) != n) throw InputError("--x0 must have one value per dimension");
    for (int i = 0; i < n; ++i) x0(i) = x0_list[static_cast<std::size_t>(i)];
  }
  const EnsembleSpec ens{paths, dt, seed.value_or(config.seed), config.threads};
  const auto samples = run_ensemble(ens, [&](std::size_t i, RandomStream&) {
    const auto p = simulate(manifold, drift, x0, t, dt, RngSpec{ens.seed, i});
    std::vector<double> row(p.points.back().data(), p.points.back().data() + n);
    row.push_back(p.radial.back());
    row.push_back(p.exited ? 1.0 : 0.0);
    return row;
  });
  std::vector<double> r2;
  for (const auto& s : samples) r2.push_back(s[static_cast<std::size_t>(n)] * s[static_cast<std::size_t>(n)]);
  const auto e = estimate(r2);
  std::cout << fmt::format("E[r^2(X_{:g})] = {:.6g} +- {:.3g} over {} paths\n", t, e.mean, e.stderr_, paths);
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << "path";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    out << ",r,exited\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out << i;
      for (double v : samples[i]) out << fmt::format(",{:.17g}", v);
      out << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for V-harmonic maps and Delta_V diffusions"};
  app.require_subcommand(1);

  std::string config, out_dir, module, csv;
  auto* run_cmd = app.add_subcommand("run", "Run the checks of an experiment config");
  run_cmd->add_option("config", config, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Directory for verdicts.csv and summary.json");

  auto* list_cmd = app.add_subcommand("list", "List registered checks");
  list_cmd->add_option("--module", module, "Only checks of this module");

  double max_radius = 64.0;
  int directions = 8;
  auto* audit_cmd = app.add_subcommand("audit", "Audit the growth conditions of a config's drift");
  audit_cmd->add_option("config", config, "Config file")->required();
  audit_cmd->add_option("--max-radius", max_radius, "Largest audited radius");
  audit_cmd->add_option("--directions", directions, "Number of radial directions");
  audit_cmd->add_option("--csv", csv, "Write audit rows to this file");

  std::size_t paths = 0;
  double dt = 0.0, t = 1.0;
  std::optional<std::uint64_t> seed;
  std::vector<double> x0;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the Delta_V diffusion of a config");
  sim_cmd->alias("diffuse");
  sim_cmd->add_option("--config", config, "Config file")->required();
  sim_cmd->add_option("--paths", paths, "Number of paths")->required();
  sim_cmd->add_option("--dt", dt, "Time step")->required();
  sim_cmd->add_option("--t", t, "End time");
  sim_cmd->add_option("--seed", seed, "Seed (defaults to the config seed)");
  sim_cmd->add_option("--x0", x0, "Start point")->delimiter(',');
  sim_cmd->add_option("--out", csv, "Write end points to this CSV file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config, out_dir);
    if (*list_cmd) return list(module);
    if (*audit_cmd) return audit(config, max_radius, directions, csv);
    if (*sim_cmd) return simulate(config, paths, dt, t, seed, x0, csv);
  } catch (const vharm::ValidationError& e) {
    std::cerr << config << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
