#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vharm/geometry/manifold.hpp"
#include "vharm/types.hpp"

namespace vharm {

/// Dirichlet data: target chart point for a domain point on (or near) the sphere.
using BoundaryFn = std::function<Point(const Point&)>;

/// Target-valued map on the lattice center + h Z^n restricted to the chart
/// ball |x - center| <= radius. Interior nodes lie strictly inside the ball
/// (by at least h/100); an edge from an interior node that leaves the ball is
/// cut at the sphere and carries the boundary value there. Nodes outside hold
/// the boundary data evaluated at the node, which only serves interpolation.
class MapGrid {
 public:
  struct Edge {
    std::optional<std::size_t> to;  // neighbor node, or empty for a cut edge
    double length = 0.0;
    Point boundary_point;           // cut edges only
    Point boundary_value;           // cut edges only
  };

  MapGrid(int domain_dim, ManifoldModel target, Point center, double radius, double h);

  int domain_dim() const noexcept { return n_; }
  const ManifoldModel& target() const noexcept { return target_; }
  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  double spacing() const noexcept { return h_; }

  std::size_t node_count() const noexcept { return values_.size(); }
  Point position(std::size_t node) const;
  bool interior(std::size_t node) const { return interior_slot_[node] >= 0; }
  const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }
  /// Edges of an interior node in the order (dim 0, +), (dim 0, -), (dim 1, +), ...
  const Edge* edges(std::size_t node) const;
  Edge* edges(std::size_t node);

  const Point& value(std::size_t node) const { return values_[node]; }
  Point& value(std::size_t node) { return values_[node]; }
  const Point& edge_value(const Edge& e) const { return e.to ? values_[*e.to] : e.boundary_value; }

  /// Writes boundary data on cut edges and on exterior nodes.
  void set_boundary(const BoundaryFn& g);
  /// Fills interior nodes with one value.
  void fill_interior(const Point& y);

  /// Linear index of the node nearest to x, if x is inside the lattice box.
  std::optional<std::size_t> nearest_node(const Point& x) const;
  /// Multilinear interpolation of target chart coordinates.
  Point interpolate(const Point& x) const;
  /// Multilinear interpolation of per-node scalars.
  double interpolate(const std::vector<double>& node_values, const Point& x) const;

  /// m_u(a) = sup over nodes and boundary points within distance a of the
  /// center of d_N(u, o).
  double sup_distance(const Point& o, double a) const;

  bool solved() const noexcept { return solved_; }
  double residual() const noexcept { return residual_; }
  void mark_solved(double residual) {
    solved_ = true;
    residual_ = residual;
  }

  /// Versioned text format: header lines, then node rows and cut-edge rows.
  void write(std::ostream& out) const;
  static MapGrid read(std::istream& in);

 private:
  std::size_t linear(const std::vector<int>& idx) const;
  std::vector<int> lattice_index(std::size_t node) const;

  int n_;
  ManifoldModel target_;
  Point center_;
  double radius_;
  double h_;
  int half_width_;
  int side_;
  std::vector<Point> values_;
  std::vector<long> interior_slot_;
  std::vector<std::size_t> interior_;
  std::vector<Edge> edges_;
  bool solved_ = false;
  double residual_ = 0.0;
};

}  // namespace vharm
