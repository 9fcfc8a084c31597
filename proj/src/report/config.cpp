#include "vharm/report/config.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vharm/errors.hpp"
#include "vharm/report/registry.hpp"

namespace vharm {

namespace {

constexpr std::string_view kCheckPrefix = "check ";

std::string number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string number_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + number(xs[i]);
  return s;
}

void add(KeyValueSection& s, std::string key, std::string value) {
  s.entries.push_back(KeyValueEntry{std::move(key), std::move(value), 0});
}

ModelSpec parse_model(const KeyValueSection& s) {
  s.check_keys({"kind", "dim", "kappa", "warp", "warp_param"});
  ModelSpec spec;
  spec.kind = s.require("kind").value;
  const long long dim = s.require_int("dim");
  if (dim < 1 || dim > kMaxDim) throw ValidationError(s.require("dim").line, "dim", "dimension out of range");
  spec.dim = static_cast<int>(dim);
  if (s.find("kappa")) spec.kappa = s.require_double("kappa");
  if (s.find("warp")) spec.warp = s.require("warp").value;
  if (s.find("warp_param")) spec.warp_param = s.require_double("warp_param");
  try {
    (void)spec.build();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(s.require("kind").line, "kind", e.what());
  }
  return spec;
}

void write_model(KeyValueSection& s, const ModelSpec& m) {
  add(s, "kind", m.kind);
  add(s, "dim", std::to_string(m.dim));
  if (m.kappa) add(s, "kappa", number(*m.kappa));
  if (m.warp) add(s, "warp", *m.warp);
  if (m.warp_param) add(s, "warp_param", number(*m.warp_param));
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char separator) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(separator, start), text.size());
    std::string piece = text.substr(start, end - start);
    const auto b = piece.find_first_not_of(" \t");
    const auto e = piece.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : piece.substr(b, e - b + 1));
    start = end + 1;
  }
  return out;
}

ManifoldModel ModelSpec::build() const {
  if (kind == "euclidean") return ManifoldModel::euclidean(dim);
  if (kind == "hyperbolic") return ManifoldModel::hyperbolic(dim, kappa.value_or(-1.0));
  if (kind == "sphere") return ManifoldModel::sphere(dim, kappa.value_or(1.0));
  if (kind == "rotationally_symmetric") {
    if (!warp) throw InputError("rotationally symmetric model needs a warp");
    WarpProfile w = *warp == "flat"         ? WarpProfile::flat()
                    : *warp == "hyperbolic" ? WarpProfile::hyperbolic(warp_param.value_or(-1.0))
                    : *warp == "spherical"  ? WarpProfile::spherical(warp_param.value_or(1.0))
                    : *warp == "cubic"      ? WarpProfile::cubic(warp_param.value_or(0.0))
                                            : throw InputError("unknown warp '" + *warp + "'");
    return ManifoldModel::rotationally_symmetric(dim, std::move(w));
  }
  throw InputError("unknown model kind '" + kind + "'");
}

DriftField DriftSpec::build(const ManifoldModel& manifold) const {
  const int n = manifold.dim();
  if (kind == "zero") return DriftField::zero(n);
  if (kind == "gradient") {
    return DriftField::gradient_of(manifold, ScalarField::from_expression(Expression::parse(potential, n)))
        .with_description("grad(" + potential + ")");
  }
  if (kind == "constant") {
    if (static_cast<int>(vector.size()) != n) throw InputError("constant drift dimension does not match the manifold");
    Vec c(n);
    for (int i = 0; i < n; ++i) c(i) = vector[static_cast<std::size_t>(i)];
    return DriftField::constant(c);
  }
  if (kind == "field") {
    std::vector<Expression> exprs;
    for (const auto& piece : split_list(components, ';')) exprs.push_back(Expression::parse(piece, n));
    if (static_cast<int>(exprs.size()) != n) throw InputError("drift field needs one component per dimension");
    return DriftField::from_expressions(exprs).with_description(components);
  }
  throw InputError("unknown drift kind '" + kind + "'");
}

std::string CheckSpec::check_name() const { return id.substr(0, id.find(':')); }

bool CheckSpec::operator==(const CheckSpec& other) const {
  if (id != other.id || params.entries.size() != other.params.entries.size()) return false;
  for (std::size_t i = 0; i < params.entries.size(); ++i) {
    if (params.entries[i].key != other.params.entries[i].key || params.entries[i].value != other.params.entries[i].value) {
      return false;
    }
  }
  return true;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return experiment_id == o.experiment_id && seed == o.seed && threads == o.threads && manifold == o.manifold &&
         drift == o.drift && m == o.m && kappa == o.kappa && c_p == o.c_p && target == o.target && checks == o.checks;
}

ExperimentConfig ExperimentConfig::parse(const KeyValueDocument& doc) {
  ExperimentConfig cfg;
  bool seen_experiment = false, seen_manifold = false, seen_drift = false, seen_model = false;
  for (const KeyValueSection& s : doc.sections) {
    if (s.name.empty()) {
      if (!s.entries.empty()) throw ValidationError(s.entries.front().line, s.entries.front().key, "field outside any section");
      continue;
    }
    if (s.name == "experiment") {
      seen_experiment = true;
      s.check_keys({"id", "seed", "threads"});
      cfg.experiment_id = s.require("id").value;
      if (cfg.experiment_id.empty()) throw ValidationError(s.require("id").line, "id", "empty experiment id");
      const long long seed = s.require_int("seed");
      if (seed < 0) throw ValidationError(s.require("seed").line, "seed", "seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(seed);
      const long long threads = s.get_int("threads", 0);
      if (threads < 0) throw ValidationError(s.require("threads").line, "threads", "threads must be nonnegative");
      cfg.threads = static_cast<unsigned>(threads);
    } else if (s.name == "manifold") {
      seen_manifold = true;
      cfg.manifold = parse_model(s);
    } else if (s.name == "target") {
      cfg.target = parse_model(s);
    } else if (s.name == "drift") {
      seen_drift = true;
      s.check_keys({"kind", "potential", "vector", "components"});
      cfg.drift.kind = s.require("kind").value;
      const int line = s.require("kind").line;
      if (cfg.drift.kind == "gradient") {
        cfg.drift.potential = s.require("potential").value;
      } else if (cfg.drift.kind == "constant") {
        cfg.drift.vector = parse_list(s.require("vector"));
      } else if (cfg.drift.kind == "field") {
        cfg.drift.components = s.require("components").value;
      } else if (cfg.drift.kind != "zero") {
        throw ValidationError(line, "kind", "drift kind must be zero, gradient, constant or field");
      }
      for (const auto& e : s.entries) {
        const bool used = e.key == "kind" || (e.key == "potential" && cfg.drift.kind == "gradient") ||
                          (e.key == "vector" && cfg.drift.kind == "constant") ||
                          (e.key == "components" && cfg.drift.kind == "field");
        if (!used) throw ValidationError(e.line, e.key, "field does not apply to drift kind " + cfg.drift.kind);
      }
    } else if (s.name == "model") {
      seen_model = true;
      s.check_keys({"m", "kappa", "c_p"});
      const auto& entry = s.require("m");
      try {
        (void)EffectiveDimension::parse(entry.value);
      } catch (const Error& e) {
        throw ValidationError(entry.line, "m", e.what());
      }
      cfg.m = entry.value;
      cfg.kappa = s.get_double("kappa", 0.0);
      if (s.find("c_p")) cfg.c_p = s.require_double("c_p");
    } else if (s.name.rfind(kCheckPrefix, 0) == 0) {
      CheckSpec check;
      check.id = s.name.substr(kCheckPrefix.size());
      check.id.erase(0, check.id.find_first_not_of(' '));
      check.params = s;
      const CheckInfo* info = find_check(check.check_name());
      if (!info) throw ValidationError(s.line, check.id, "unknown check '" + check.check_name() + "'");
      std::vector<std::string> allowed = info->required;
      allowed.insert(allowed.end(), info->optional.begin(), info->optional.end());
      s.check_keys(allowed);
      for (const auto& key : info->required) (void)s.require(key);
      for (const auto& other : cfg.checks) {
        if (other.id == check.id) throw ValidationError(s.line, check.id, "duplicate check id");
      }
      cfg.checks.push_back(std::move(check));
    } else {
      throw ValidationError(s.line, s.name, "unknown section");
    }
  }
  if (!seen_experiment) throw ValidationError(0, "experiment", "missing [experiment] section");
  if (!seen_manifold) throw ValidationError(0, "manifold", "missing [manifold] section");
  if (!seen_drift) throw ValidationError(0, "drift", "missing [drift] section");
  if (!seen_model) throw ValidationError(0, "model", "missing [model] section");
  try {
    const ManifoldModel M = cfg.manifold.build();
    (void)cfg.drift.build(M);
    cfg.effective_dimension().validate_for(M.dim());
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(0, "model", e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  return parse(KeyValueDocument::parse_string(text));
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(KeyValueDocument::parse_file(path)); }

KeyValueDocument ExperimentConfig::to_document() const {
  KeyValueDocument doc;
  KeyValueSection e{"experiment", {}, 0};
  add(e, "id", experiment_id);
  add(e, "seed", std::to_string(seed));
  if (threads) add(e, "threads", std::to_string(threads));
  doc.sections.push_back(std::move(e));

  KeyValueSection mf{"manifold", {}, 0};
  write_model(mf, manifold);
  doc.sections.push_back(std::move(mf));

  KeyValueSection d{"drift", {}, 0};
  add(d, "kind", drift.kind);
  if (drift.kind == "gradient") add(d, "potential", drift.potential);
  if (drift.kind == "constant") add(d, "vector", number_list(drift.vector));
  if (drift.kind == "field") add(d, "components", drift.components);
  doc.sections.push_back(std::move(d));

  KeyValueSection mo{"model", {}, 0};
  add(mo, "m", m);
  add(mo, "kappa", number(kappa));
  if (c_p) add(mo, "c_p", number(*c_p));
  doc.sections.push_back(std::move(mo));

  if (target) {
    KeyValueSection t{"target", {}, 0};
    write_model(t, *target);
    doc.sections.push_back(std::move(t));
  }
  for (const CheckSpec& c : checks) {
    KeyValueSection s{std::string(kCheckPrefix) + c.id, {}, 0};
    for (const auto& entry : c.params.entries) add(s, entry.key, entry.value);
    doc.sections.push_back(std::move(s));
  }
  return doc;
}

std::string ExperimentConfig::to_string() const { return to_document().to_string(); }

}  // namespace vharm
