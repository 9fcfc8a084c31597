#include "vharm/harmonic/map_grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "vharm/errors.hpp"

namespace vharm {

namespace {

constexpr const char* kHeader = "vharm-mapgrid 1";

std::string join(const Point& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += fmt::format(" {:.17g}", x(i));
  return s;
}

Point read_point(std::istream& in, int n) {
  Point x(n);
  for (int i = 0; i < n; ++i) {
    if (!(in >> x(i))) throw InputError("mapgrid: truncated coordinate list");
  }
  return x;
}

void expect(std::istream& in, const std::string& key) {
  std::string word;
  if (!(in >> word) || word != key) throw InputError(fmt::format("mapgrid: expected '{}', found '{}'", key, word));
}

}  // namespace

MapGrid::MapGrid(int domain_dim, ManifoldModel target, Point center, double radius, double h)
    : n_(domain_dim), target_(std::move(target)), center_(std::move(center)), radius_(radius), h_(h) {
  if (n_ < 1 || n_ > 3) throw InputError("MapGrid: domain dimension must be 1, 2 or 3");
  if (center_.size() != n_) throw InputError("MapGrid: center dimension mismatch");
  if (!(radius_ > 0.0) || !(h_ > 0.0) || h_ > radius_) throw InputError("MapGrid: need 0 < h <= radius");
  half_width_ = static_cast<int>(std::ceil(radius_ / h_)) + 1;
  side_ = 2 * half_width_ + 1;
  std::size_t count = 1;
  for (int d = 0; d < n_; ++d) count *= static_cast<std::size_t>(side_);
  values_.assign(count, Point::Zero(target_.dim()));
  interior_slot_.assign(count, -1);

  const double inner = radius_ - 0.01 * h_;
  for (std::size_t node = 0; node < count; ++node) {
    if ((position(node) - center_).norm() <= inner) {
      interior_slot_[node] = static_cast<long>(interior_.size());
      interior_.push_back(node);
    }
  }

  std::size_t stride = 1;
  std::vector<std::size_t> strides(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    strides[static_cast<std::size_t>(d)] = stride;
    stride *= static_cast<std::size_t>(side_);
  }
  edges_.resize(interior_.size() * 2 * static_cast<std::size_t>(n_));
  for (std::size_t slot = 0; slot < interior_.size(); ++slot) {
    const std::size_t node = interior_[slot];
    const Point y = position(node) - center_;
    for (int d = 0; d < n_; ++d) {
      for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        Edge& e = edges_[slot * 2 * static_cast<std::size_t>(n_) + static_cast<std::size_t>(2 * d + s)];
        // Interior nodes never sit on the outermost lattice layer, so the
        // neighbor index is always in range.
        const std::size_t nb = s == 0 ? node + strides[static_cast<std::size_t>(d)]
                                      : node - strides[static_cast<std::size_t>(d)];
        if (interior_slot_[nb] >= 0) {
          e.to = nb;
          e.length = h_;
          continue;
        }
        // |y + sign t e_d| = radius, positive root.
        const double yd = y(d);
        const double disc = yd * yd - y.squaredNorm() + radius_ * radius_;
        double t = -sign * yd + std::sqrt(std::max(disc, 0.0));
        t = std::clamp(t, 1e-3 * h_, h_);
        e.length = t;
        e.boundary_point = position(node);
        e.boundary_point(d) += sign * t;
        e.boundary_value = Point::Zero(target_.dim());
      }
    }
  }
}

std::size_t MapGrid::linear(const std::vector<int>& idx) const {
  std::size_t node = 0;
  for (int d = n_ - 1; d >= 0; --d) node = node * static_cast<std::size_t>(side_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
  return node;
}

std::vector<int> MapGrid::lattice_index(std::size_t node) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(node % static_cast<std::size_t>(side_));
    node /= static_cast<std::size_t>(side_);
  }
  return idx;
}

Point MapGrid::position(std::size_t node) const {
  const auto idx = lattice_index(node);
  Point x = center_;
  for (int d = 0; d < n_; ++d) x(d) += h_ * (idx[static_cast<std::size_t>(d)] - half_width_);
  return x;
}

const MapGrid::Edge* MapGrid::edges(std::size_t node) const {
  const long slot = interior_slot_.at(node);
  if (slot < 0) throw InputError("MapGrid: edges requested for a non-interior node");
  return &edges_[static_cast<std::size_t>(slot) * 2 * static_cast<std::size_t>(n_)];
}

MapGrid::Edge* MapGrid::edges(std::size_t node) {
  return const_cast<Edge*>(static_cast<const MapGrid*>(this)->edges(node));
}

void MapGrid::set_boundary(const BoundaryFn& g) {
  for (std::size_t node = 0; node < values_.size(); ++node) {
    if (interior_slot_[node] < 0) values_[node] = g(position(node));
  }
  for (Edge& e : edges_) {
    if (!e.to) {
      e.boundary_value = g(e.boundary_point);
      if (e.boundary_value.size() != target_.dim()) throw InputError("MapGrid: boundary value dimension mismatch");
      target_.require_in_chart(e.boundary_value);
    }
  }
  solved_ = false;
}

void MapGrid::fill_interior(const Point& y) {
  for (std::size_t node : interior_) values_[node] = y;
  solved_ = false;
}

std::optional<std::size_t> MapGrid::nearest_node(const Point& x) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    const long i = std::lround((x(d) - center_(d)) / h_) + half_width_;
    if (i < 0 || i >= side_) return std::nullopt;
    idx[static_cast<std::size_t>(d)] = static_cast<int>(i);
  }
  return linear(idx);
}

namespace {

// Cell origin and fractional offsets for multilinear interpolation.
template <typename F>
void for_each_corner(int n, int side, int half_width, double h, const Point& center, const Point& x, F&& visit) {
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const double t = (x(d) - center(d)) / h + half_width;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, side - 2);
    base[static_cast<std::size_t>(d)] = i;
    frac[static_cast<std::size_t>(d)] = std::clamp(t - i, 0.0, 1.0);
  }
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    std::size_t node = 0;
    for (int d = n - 1; d >= 0; --d) {
      const int bit = (corner >> d) & 1;
      w *= bit ? frac[static_cast<std::size_t>(d)] : 1.0 - frac[static_cast<std::size_t>(d)];
      node = node * static_cast<std::size_t>(side) + static_cast<std::size_t>(base[static_cast<std::size_t>(d)] + bit);
    }
    visit(node, w);
  }
}

}  // namespace

Point MapGrid::interpolate(const Point& x) const {
  Point y = Point::Zero(target_.dim());
  for_each_corner(n_, side_, half_width_, h_, center_, x, [&](std::size_t node, double w) { y += w * values_[node]; });
  return y;
}

double MapGrid::interpolate(const std::vector<double>& node_values, const Point& x) const {
  if (node_values.size() != values_.size()) throw InputError("MapGrid: node value count mismatch");
  double y = 0.0;
  for_each_corner(n_, side_, half_width_, h_, center_, x, [&](std::size_t node, double w) { y += w * node_values[node]; });
  return y;
}

double MapGrid::sup_distance(const Point& o, double a) const {
  double m = 0.0;
  for (std::size_t node : interior_) {
    if ((position(node) - center_).norm() <= a + 1e-12) m = std::max(m, target_.distance(o, values_[node]));
  }
  if (radius_ <= a + 1e-12) {
    for (const Edge& e : edges_) {
      if (!e.to) m = std::max(m, target_.distance(o, e.boundary_value));
    }
  }
  return m;
}

void MapGrid::write(std::ostream& out) const {
  out << kHeader << '\n';
  out << "domain_dim " << n_ << '\n';
  out << fmt::format("target {} {} {:.17g}\n", to_string(target_.kind()), target_.dim(), target_.kappa());
  out << "center" << join(center_) << '\n';
  out << fmt::format("radius {:.17g}\nspacing {:.17g}\n", radius_, h_);
  out << fmt::format("solved {} {:.17g}\n", solved_ ? 1 : 0, residual_);
  out << "nodes " << values_.size() << '\n';
  for (std::size_t node = 0; node < values_.size(); ++node) out << node << join(values_[node]) << '\n';
  std::size_t cuts = 0;
  for (const Edge& e : edges_) cuts += e.to ? 0 : 1;
  out << "cut_edges " << cuts << '\n';
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!edges_[i].to) out << i << join(edges_[i].boundary_value) << '\n';
  }
}

MapGrid MapGrid::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw InputError("mapgrid: missing or unsupported header");
  int n = 0;
  expect(in, "domain_dim");
  in >> n;
  std::string kind;
  int k = 0;
  double kappa = 0.0;
  expect(in, "target");
  in >> kind >> k >> kappa;
  if (!in) throw InputError("mapgrid: malformed target line");
  ManifoldModel target = kind == "euclidean"    ? ManifoldModel::euclidean(k)
                         : kind == "hyperbolic" ? ManifoldModel::hyperbolic(k, kappa)
                         : kind == "sphere"     ? ManifoldModel::sphere(k, kappa)
                                                : throw InputError("mapgrid: unsupported target kind " + kind);
  expect(in, "center");
  Point center = read_point(in, n);
  double radius = 0.0, h = 0.0;
  expect(in, "radius");
  in >> radius;
  expect(in, "spacing");
  in >> h;
  int solved = 0;
  double residual = 0.0;
  expect(in, "solved");
  in >> solved >> residual;
  MapGrid grid(n, std::move(target), std::move(center), radius, h);
  std::size_t count = 0;
  expect(in, "nodes");
  in >> count;
  if (count != grid.values_.size()) throw InputError("mapgrid: node count does not match the lattice");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t node = 0;
    if (!(in >> node) || node >= count) throw InputError("mapgrid: bad node row");
    grid.values_[node] = read_point(in, k);
  }
  expect(in, "cut_edges");
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t idx = 0;
    if (!(in >> idx) || idx >= grid.edges_.size() || grid.edges_[idx].to) throw InputError("mapgrid: bad cut-edge row");
    grid.edges_[idx].boundary_value = read_point(in, k);
  }
  if (solved) grid.mark_solved(residual);
  return grid;
}

}  // namespace vharm
