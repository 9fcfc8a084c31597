#include "vharm/harmonic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <fmt/format.h>

#include "vharm/errors.hpp"
#include "vharm/stats.hpp"

namespace vharm {

namespace {

struct Weights {
  std::vector<double> edge;  // per interior slot, 2n entries
  std::vector<double> rho;   // per interior slot
  bool gradient = false;
};

Weights compute_weights(const MapGrid& u, const DriftField& V) {
  const int n = u.domain_dim();
  if (V.dim() != n) throw InputError("harmonic solver: drift dimension does not match the domain");
  Weights w;
  const auto& nodes = u.interior_nodes();
  const std::size_t per = 2 * static_cast<std::size_t>(n);
  w.edge.resize(nodes.size() * per);
  w.rho.resize(nodes.size());
  const double hn1 = std::pow(u.spacing(), n - 1);
  const auto& potential = V.potential();
  w.gradient = V.identically_zero() || potential.has_value();
  // Shift f by its value at the center to keep the exponentials in range.
  const double f0 = (w.gradient && !V.identically_zero()) ? potential->value(u.center()) : 0.0;
  auto f = [&](const Point& x) { return V.identically_zero() ? 0.0 : potential->value(x) - f0; };
  for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
    const Point xi = u.position(nodes[slot]);
    const MapGrid::Edge* e = u.edges(nodes[slot]);
    w.rho[slot] = w.gradient ? std::exp(-f(xi)) : 1.0;
    for (std::size_t k = 0; k < per; ++k) {
      const Point xj = e[k].to ? u.position(*e[k].to) : e[k].boundary_point;
      const Point mid = 0.5 * (xi + xj);
      const double factor = w.gradient ? std::exp(-f(mid)) : std::exp(-0.5 * V.at(mid).dot(xj - xi));
      w.edge[slot * per + k] = factor * hn1 / e[k].length;
    }
  }
  return w;
}

struct Target {
  const ManifoldModel& model;
  bool flat;

  Vec log(const Point& x, const Point& y) const { return flat ? Vec(y - x) : model.log(x, y); }
  Point exp(const Point& x, const Vec& v) const { return flat ? Point(x + v) : model.exp(x, v); }
  double dist2(const Point& x, const Point& y) const {
    if (flat) return (y - x).squaredNorm();
    const double d = model.distance(x, y);
    return d * d;
  }
};

struct Regular {
  Point o;
  double radius = std::numeric_limits<double>::infinity();
};

double energy_with(const MapGrid& u, const Weights& w, const Target& t) {
  const std::size_t per = 2 * static_cast<std::size_t>(u.domain_dim());
  const auto& nodes = u.interior_nodes();
  std::vector<double> parts(nodes.size());
  for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
    const MapGrid::Edge* e = u.edges(nodes[slot]);
    double s = 0.0;
    for (std::size_t k = 0; k < per; ++k) {
      // Interior edges are seen from both ends.
      const double share = e[k].to ? 0.5 : 1.0;
      s += share * 0.5 * w.edge[slot * per + k] * t.dist2(u.value(nodes[slot]), u.edge_value(e[k]));
    }
    parts[slot] = s;
  }
  return pairwise_sum(parts);
}

double residual_with(const MapGrid& u, const Weights& w, const Target& t) {
  const int n = u.domain_dim();
  const std::size_t per = 2 * static_cast<std::size_t>(n);
  const double hn = std::pow(u.spacing(), n);
  double sup = 0.0;
  const auto& nodes = u.interior_nodes();
  for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
    const Point& ui = u.value(nodes[slot]);
    const MapGrid::Edge* e = u.edges(nodes[slot]);
    Vec s = Vec::Zero(ui.size());
    for (std::size_t k = 0; k < per; ++k) s += w.edge[slot * per + k] * t.log(ui, u.edge_value(e[k]));
    s /= hn * w.rho[slot];
    sup = std::max(sup, t.flat ? s.norm() : t.model.norm(ui, s));
  }
  return sup;
}

// Gauss-Seidel sweeps until the residual drops below tol. Returns false when
// max_sweeps is exhausted.
bool iterate(MapGrid& u, const Weights& w, const Target& t, const Regular& reg, const SolverOptions& opts,
             double eta, SolveResult& out, bool track_energy) {
  const std::size_t per = 2 * static_cast<std::size_t>(u.domain_dim());
  const auto& nodes = u.interior_nodes();
  double energy = track_energy ? energy_with(u, w, t) : 0.0;
  if (track_energy) out.energy_history.push_back(energy);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    bool overshoot = false;
    double change = 0.0;
    for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
      Point& ui = u.value(nodes[slot]);
      const MapGrid::Edge* e = u.edges(nodes[slot]);
      const double* c = &w.edge[slot * per];
      double total = 0.0;
      Vec s = Vec::Zero(ui.size());
      for (std::size_t k = 0; k < per; ++k) {
        s += c[k] * t.log(ui, u.edge_value(e[k]));
        total += c[k];
      }
      const Vec mean = s / total;
      Point next = t.exp(ui, eta * mean);
      if (std::isfinite(reg.radius)) {
        const double d = t.model.distance(reg.o, next);
        if (d > reg.radius) {
          const Vec v = t.model.log(reg.o, next);
          next = t.model.exp(reg.o, v * (reg.radius / d));
          out.projected = true;
        }
      }
      if (!t.model.in_chart(next)) {
        overshoot = true;
        continue;
      }
      if (!track_energy) {
        ui = next;
        continue;
      }
      double delta = 0.0;
      if (t.flat && !std::isfinite(reg.radius)) {
        // Exact local decrement of the quadratic local energy.
        delta = 0.5 * total * ((1.0 - eta) * (1.0 - eta) - 1.0) * mean.squaredNorm();
      } else {
        double local = 0.0;
        for (std::size_t k = 0; k < per; ++k) {
          const Point& uj = u.edge_value(e[k]);
          const double before = t.dist2(ui, uj);
          delta += 0.5 * c[k] * (t.dist2(next, uj) - before);
          local += 0.5 * c[k] * before;
        }
        if (delta > 0.0) {
          // Increases at the floating resolution of the local energy are
          // accepted as zero; genuine increases are refused and halve eta.
          if (delta > 1e-12 * local) {
            overshoot = true;
            continue;
          }
          delta = 0.0;
        }
      }
      ui = next;
      change += delta;
    }
    out.sweeps += 1;
    if (track_energy) {
      energy += change;
      out.energy_history.push_back(energy);
    }
    if (overshoot) {
      eta *= 0.5;
      out.halvings += 1;
      if (out.halvings > opts.max_halvings) {
        throw NoConvergenceError(fmt::format("harmonic solver: energy increase persists after {} halvings", opts.max_halvings));
      }
    }
    if (sweep % std::max(1, opts.residual_every) == 0 || sweep == opts.max_sweeps) {
      out.residual = residual_with(u, w, t);
      if (!std::isfinite(out.residual)) throw NoConvergenceError("harmonic solver: residual is not finite");
      if (out.residual < opts.tol) return true;
    }
  }
  return false;
}

double default_eta(const MapGrid& u) {
  static constexpr double first_zero[] = {std::numbers::pi / 2.0, 2.404825557695773, std::numbers::pi};
  const int n = u.domain_dim();
  const double rate = first_zero[n - 1] * u.spacing() / (u.radius() * std::sqrt(static_cast<double>(n)));
  return std::clamp(2.0 / (1.0 + rate), 1.0, 1.95);
}

Regular regular_ball(const MapGrid& u, SolveResult& out) {
  Regular reg;
  const ManifoldModel& target = u.target();
  if (target.kind() != ManifoldKind::sphere) return reg;
  reg.o = Point::Zero(target.dim());
  double reach = 0.0;
  for (std::size_t node : u.interior_nodes()) {
    const MapGrid::Edge* e = u.edges(node);
    for (int k = 0; k < 2 * u.domain_dim(); ++k) {
      if (!e[k].to) reach = std::max(reach, target.distance(reg.o, e[k].boundary_value));
    }
  }
  const double limit = std::numbers::pi / (2.0 * std::sqrt(target.kappa()));
  if (reach >= limit) {
    throw InputError(fmt::format("harmonic solver: boundary data reaches distance {:.6g} from the chart origin, "
                                 "outside every regular ball (limit {:.6g})",
                                 reach, limit));
  }
  reg.radius = 0.5 * (reach + limit);
  out.notes.push_back(fmt::format("regular ball about the chart origin: data radius {:.6g}, projection radius {:.6g}",
                                  reach, reg.radius));
  return reg;
}

SolveResult run(MapGrid grid, const DriftField& V, const SolverOptions& opts, bool initialize) {
  SolveResult out{std::move(grid), 0, 0.0, {}, 0, false, {}};
  MapGrid& u = out.grid;
  const Weights w = compute_weights(u, V);
  const Regular reg = regular_ball(u, out);
  const double eta = opts.eta.value_or(default_eta(u));
  if (!(eta > 0.0 && eta < 2.0)) throw InputError("harmonic solver: eta must lie in (0, 2)");

  if (initialize) {
    // Harmonic interpolation of the boundary chart coordinates.
    const ManifoldModel flat = ManifoldModel::euclidean(u.target().dim());
    const Weights w0 = compute_weights(u, DriftField::zero(u.domain_dim()));
    SolverOptions init = opts;
    init.tol = 1e-6;
    init.max_sweeps = 20000;
    SolveResult scratch{u, 0, 0.0, {}, 0, false, {}};
    u.fill_interior(Point::Zero(u.target().dim()));
    iterate(u, w0, Target{flat, true}, Regular{}, init, default_eta(u), scratch, false);
    for (std::size_t node : u.interior_nodes()) {
      if (!u.target().in_chart(u.value(node))) throw DomainError("harmonic solver: initial interpolant leaves the target chart");
    }
  }

  if (!w.gradient) out.notes.push_back("non-gradient drift: energy descent undefined, convergence judged by the residual only");
  const Target t{u.target(), u.target().kind() == ManifoldKind::euclidean};
  const bool converged = iterate(u, w, t, reg, opts, eta, out, w.gradient);
  if (!converged) {
    throw NoConvergenceError(fmt::format("harmonic solver: residual {:.3g} above tolerance {:.3g} after {} sweeps",
                                         out.residual, opts.tol, out.sweeps));
  }
  if (out.projected) out.notes.push_back("iterate left the regular ball; projection applied");
  u.mark_solved(out.residual);
  return out;
}

}  // namespace

bool SolveResult::energy_nonincreasing() const {
  for (std::size_t i = 1; i < energy_history.size(); ++i) {
    if (energy_history[i] > energy_history[i - 1]) return false;
  }
  return true;
}

SolveResult solve(const ManifoldModel& domain, const Point& center, double radius, double h, const BoundaryFn& g,
                  const ManifoldModel& target, const DriftField& V, const SolverOptions& opts) {
  if (domain.kind() != ManifoldKind::euclidean) {
    throw UnsupportedConfigurationError("harmonic solver: lattice domains must be Euclidean");
  }
  if (domain.dim() != center.size()) throw InputError("harmonic solver: center dimension mismatch");
  if (target.kind() == ManifoldKind::rotationally_symmetric) {
    throw UnsupportedConfigurationError("harmonic solver: target must be a constant-curvature model");
  }
  MapGrid grid(domain.dim(), target, center, radius, h);
  grid.set_boundary(g);
  return run(std::move(grid), V, opts, true);
}

SolveResult solve(MapGrid grid, const DriftField& V, const SolverOptions& opts) {
  return run(std::move(grid), V, opts, false);
}

double tension_residual(const MapGrid& u, const DriftField& V) {
  return residual_with(u, compute_weights(u, V), Target{u.target(), u.target().kind() == ManifoldKind::euclidean});
}

double discrete_energy(const MapGrid& u, const DriftField& V) {
  return energy_with(u, compute_weights(u, V), Target{u.target(), u.target().kind() == ManifoldKind::euclidean});
}

std::vector<double> discrete_laplacian(const MapGrid& u, const DriftField& V, const std::vector<double>& node_values,
                                       const std::function<double(const MapGrid::Edge&)>& boundary) {
  if (node_values.size() != u.node_count()) throw InputError("discrete_laplacian: node value count mismatch");
  const Weights w = compute_weights(u, V);
  const int n = u.domain_dim();
  const std::size_t per = 2 * static_cast<std::size_t>(n);
  const double hn = std::pow(u.spacing(), n);
  std::vector<double> out(u.node_count(), 0.0);
  const auto& nodes = u.interior_nodes();
  for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
    const MapGrid::Edge* e = u.edges(nodes[slot]);
    const double si = node_values[nodes[slot]];
    double s = 0.0;
    for (std::size_t k = 0; k < per; ++k) {
      const double sj = e[k].to ? node_values[*e[k].to] : boundary(e[k]);
      s += w.edge[slot * per + k] * (sj - si);
    }
    out[nodes[slot]] = s / (hn * w.rho[slot]);
  }
  return out;
}

std::vector<double> energy_density(const MapGrid& u) {
  const int n = u.domain_dim();
  const ManifoldModel& target = u.target();
  const Target t{target, target.kind() == ManifoldKind::euclidean};
  std::vector<double> out(u.node_count(), 0.0);
  std::vector<char> known(u.node_count(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t node : u.interior_nodes()) {
    const Point& ui = u.value(node);
    const MapGrid::Edge* e = u.edges(node);
    double total = 0.0;
    for (int d = 0; d < n; ++d) {
      const MapGrid::Edge& ep = e[2 * d];
      const MapGrid::Edge& em = e[2 * d + 1];
      const double lp = ep.length, lm = em.length;
      const Vec Lp = t.log(ui, u.edge_value(ep));
      const Vec Lm = t.log(ui, u.edge_value(em));
      const Vec grad = (lm * lm * Lp - lp * lp * Lm) / (lp * lm * (lp + lm));
      total += t.flat ? grad.squaredNorm() : std::pow(target.norm(ui, grad), 2);
    }
    out[node] = total;
    known[node] = 1;
    queue.push_back(node);
  }
  // Breadth-first fill of the remaining nodes from their interior neighbors.
  const double h = u.spacing();
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    const Point x = u.position(node);
    for (int d = 0; d < n; ++d) {
      for (double s : {1.0, -1.0}) {
        Point y = x;
        y(d) += s * h;
        const auto nb = u.nearest_node(y);
        if (!nb || known[*nb]) continue;
        known[*nb] = 1;
        out[*nb] = out[node];
        queue.push_back(*nb);
      }
    }
  }
  return out;
}

}  // namespace vharm
