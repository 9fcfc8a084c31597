#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vharm/errors.hpp"
#include "vharm/random.hpp"
#include "vharm/report/registry.hpp"
#include "vharm/report/suite.hpp"

using namespace vharm;

namespace {

const std::string kConfigDir = VHARM_CONFIG_DIR;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmall = R"(# small config
[experiment]
id = small
seed = 42

[manifold]
kind = hyperbolic
dim = 2
kappa = -1

[drift]
kind = constant
vector = 0.25, -0.5

[model]
m = -inf
kappa = -1
c_p = 1.5

[target]
kind = sphere
dim = 2

[check ito_martingale]
function = x1*x2 + 0.1
t = 0.5
x0 = 0.1, 0.2
paths = 200
dt = 0.01

[check ito_martingale:second]
function = r2
t = 0.25
paths = 100
dt = 0.05
)";

/// Line and field of the ValidationError raised by parsing text.
std::pair<int, std::string> validation_error(const std::string& text) {
  try {
    (void)ExperimentConfig::parse_string(text);
  } catch (const ValidationError& e) {
    return {e.line(), e.field()};
  }
  return {-1, ""};
}

std::string minimal(const std::string& extra) {
  return "[experiment]\nid = t\nseed = 1\n[manifold]\nkind = euclidean\ndim = 2\n[drift]\nkind = zero\n[model]\nm = "
         "inf\n" +
         extra;
}

}  // namespace

TEST_CASE("config round trip is lossless") {
  const auto cfg = ExperimentConfig::parse_string(kSmall);
  CHECK(cfg.experiment_id == "small");
  CHECK(cfg.seed == 42);
  CHECK(cfg.manifold.kind == "hyperbolic");
  CHECK(cfg.drift.vector == std::vector<double>{0.25, -0.5});
  CHECK(cfg.m == "-inf");
  CHECK(cfg.c_p == 1.5);
  REQUIRE(cfg.target);
  CHECK(cfg.target->kind == "sphere");
  REQUIRE(cfg.checks.size() == 2);
  CHECK(cfg.checks[1].id == "ito_martingale:second");
  CHECK(cfg.checks[1].check_name() == "ito_martingale");

  const auto text = cfg.to_string();
  const auto again = ExperimentConfig::parse_string(text);
  CHECK(again == cfg);
  CHECK(again.to_string() == text);

  for (const auto& name : {"euclidean_baseline", "example1_m0", "example2_recurrent", "sphere_target"}) {
    const auto bundled = ExperimentConfig::load(kConfigDir + "/" + name + ".cfg");
    CHECK(ExperimentConfig::parse_string(bundled.to_string()) == bundled);
  }
}

TEST_CASE("validation errors carry line and field") {
  CHECK(validation_error(minimal("[check kendall]\nt_grid = 1\npaths = 10\ndt = 0.1\nbogus = 2\n")) ==
        std::pair<int, std::string>{15, "bogus"});
  CHECK(validation_error(minimal("[check no_such_check]\nx = 1\n")) == std::pair<int, std::string>{11, "no_such_check"});
  // Monte-Carlo path counts have no default.
  CHECK(validation_error(minimal("[check kendall]\nt_grid = 1\ndt = 0.1\n")).second == "paths");
  CHECK(validation_error("[experiment]\nid = t\n[manifold]\nkind = euclidean\ndim = 2\n").second == "seed");
  CHECK(validation_error(minimal("[extra]\na = 1\n")) == std::pair<int, std::string>{11, "extra"});
  CHECK(validation_error(minimal("").replace(minimal("").find("dim = 2"), 7, "dim = x")) ==
        std::pair<int, std::string>{6, "dim"});
  CHECK(validation_error(minimal("").replace(minimal("").find("m = inf"), 7, "m = 1.5")).second == "model");
  CHECK(validation_error(minimal("[check kendall]\nt_grid = 1\npaths = 1\ndt = 1\n[check kendall]\nt_grid = 1\npaths = "
                                 "1\ndt = 1\n"))
            .second == "kendall");
}

TEST_CASE("registry listing") {
  const auto all = list_checks();
  CHECK(all.size() >= 18);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1]->id < all[i]->id);
  std::set<std::string> diffusion;
  for (const auto* c : list_checks("diffusion")) {
    CHECK(c->module == "diffusion");
    diffusion.insert(c->id);
  }
  for (const auto* id : {"kendall", "moment_bound", "lyapunov", "recurrence"}) CHECK(diffusion.count(id) == 1);
  CHECK(list_checks("no_such_module").empty());
  CHECK(find_check("kendall") != nullptr);
  CHECK(find_check("kendall:tag") == nullptr);
}

TEST_CASE("every check cites one anchor present in the documentation index") {
  const std::string readme = read_file(std::filesystem::path(kConfigDir).parent_path() / "README.md");
  REQUIRE(!readme.empty());
  std::set<std::string> anchors;
  for (const auto& c : registry()) {
    CHECK(!c.anchor.empty());
    CHECK(c.anchor.find(' ') == std::string::npos);
    CHECK_MESSAGE(readme.find("<a id=\"" + c.anchor + "\"></a>") != std::string::npos, c.anchor);
    anchors.insert(c.anchor);
  }
  CHECK(anchors.size() == registry().size());
}

TEST_CASE("stable hash") {
  CHECK(stable_hash("") == 14695981039346656037ULL);
  CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(stable_hash("kendall") != stable_hash("kendall:2"));
}

TEST_CASE("verdict policy") {
  const auto a = make_verdict("x", "l", Claim::at_most, 1.0, 2.0, 0.1, 0.0, "anchor");
  CHECK(a.status == Status::pass);
  CHECK(a.margin == 1.0);
  const auto b = make_verdict("x", "l", Claim::at_most, 2.1, 2.0, 0.1, 0.0, "anchor");
  CHECK(b.status == Status::boundary);
  const auto c = make_verdict("x", "l", Claim::at_least, 1.0, 2.0, 0.1, 0.0, "anchor");
  CHECK(c.status == Status::fail);
  const auto d = make_verdict("x", "l", Claim::equal, 1.0, 1.2, 0.1, 0.0, "anchor");
  CHECK(d.status == Status::pass);
  CHECK(d.margin == doctest::Approx(-0.2));
  CHECK(make_verdict("x", "l", Claim::at_most, NAN, 1.0, 0.0, 0.0, "a").status == Status::fail);
  // Property: pass implies margin >= -slack across random inputs.
  RandomStream rng(1, 0);
  for (int i = 0; i < 5000; ++i) {
    const double lhs = rng.normal(), rhs = rng.normal(), se = rng.uniform() * 0.5, tol = rng.uniform() * 0.1;
    for (Claim cl : {Claim::at_most, Claim::at_least, Claim::equal}) {
      const auto v = make_verdict("p", "l", cl, lhs, rhs, se, tol, "a");
      CHECK(v.consistent());
    }
  }
  std::ostringstream csv;
  write_verdict_csv(csv, {make_verdict("id", "a, b", Claim::at_most, 0.0, 1.0, 0.0, 0.0, "anc")});
  CHECK(csv.str() == "check_id,label,status,lhs,rhs,margin,stderr,tolerance,anchor,reason\n"
                     "id,\"a, b\",pass,0,1,1,0,0,anc,\n");
}

TEST_CASE("suite: errors become fail verdicts and drive the exit code") {
  const auto cfg = ExperimentConfig::parse_string(minimal(
      "[check kendall]\nt_grid = 0.5, 0.25\npaths = 10\ndt = 0.1\n[check hilbert_trace]\ntrials = 100\n"));
  const auto res = run_suite(cfg);
  REQUIRE(res.verdicts.size() == 2);
  CHECK(res.verdicts[0].check_id == "kendall");
  CHECK(res.verdicts[0].status == Status::fail);
  CHECK(!res.verdicts[0].reason.empty());
  CHECK(res.verdicts[0].anchor == "kendall-radial-decomposition");
  CHECK(res.verdicts[1].status == Status::pass);
  CHECK(res.exit_code() == 1);
  for (const auto& v : res.verdicts) CHECK(v.consistent());
}

TEST_CASE("suite: bundled baseline passes and reruns are byte-identical") {
  const auto cfg = ExperimentConfig::load(kConfigDir + "/euclidean_baseline.cfg");
  const auto first = run_suite(cfg);
  CHECK(first.exit_code() == 0);
  for (const auto& v : first.verdicts) {
    CHECK_MESSAGE(v.status == Status::pass, (v.check_id + ": " + v.label + " " + v.reason));
    CHECK(v.consistent());
  }
  // Declared order is kept in memory; the CSV is ordered by check id.
  CHECK(first.verdicts.front().check_id == "curvature_sampling");
  const auto dir = std::filesystem::temp_directory_path() / "vharm_report_test";
  std::filesystem::remove_all(dir);
  write_artifacts(first, dir / "a");
  write_artifacts(run_suite(cfg), dir / "b");
  const auto csv = read_file(dir / "a" / "verdicts.csv");
  CHECK(csv == read_file(dir / "b" / "verdicts.csv"));
  CHECK(read_file(dir / "a" / "summary.json") == read_file(dir / "b" / "summary.json"));
  CHECK(csv.find("\nbochner_identity,") < csv.find("\ncurvature_sampling,"));

  // Per-check seeds depend on the check id, not on its position.
  auto reordered = cfg;
  std::reverse(reordered.checks.begin(), reordered.checks.end());
  write_artifacts(run_suite(reordered), dir / "c");
  CHECK(read_file(dir / "c" / "verdicts.csv") == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("suite: example configurations") {
  const auto ex1 = run_suite(ExperimentConfig::load(kConfigDir + "/example1_m0.cfg"));
  CHECK(ex1.exit_code() == 0);
  bool a1 = false, b3 = false, decay = false;
  for (const auto& v : ex1.verdicts) {
    if (v.check_id == "condition_audit" && v.label == "A1 holds") a1 = v.status == Status::pass;
    if (v.check_id == "condition_audit" && v.label == "B3 holds") b3 = v.status == Status::pass;
    if (v.check_id == "decay_demo" && v.label.find("slope") != std::string::npos) decay = v.status == Status::pass;
  }
  CHECK(a1);
  CHECK(b3);
  CHECK(decay);

  const auto ex2 = run_suite(ExperimentConfig::load(kConfigDir + "/example2_recurrent.cfg"));
  CHECK(ex2.exit_code() == 0);
  bool trend = false;
  for (const auto& v : ex2.verdicts)
    if (v.label == "P strictly increasing in b") trend = v.status == Status::pass;
  CHECK(trend);
}
