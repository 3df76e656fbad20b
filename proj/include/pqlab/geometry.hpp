#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pqlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Disk {
  Point center;
  double radius = 1.0;
};

struct Rectangle {
  Point min;
  Point max;
};

/// Rectangle [min, max] with the upper-right quadrant [notch.x, max.x] x [notch.y, max.y] removed.
struct LShape {
  Point min;
  Point max;
  Point notch;
};

/// Simple counterclockwise polygon.
struct Polygon {
  std::vector<Point> vertices;
};

using Shape = std::variant<Disk, Rectangle, LShape, Polygon>;

/// Checks the shape invariants; throws Error(DegenerateShape) on violation.
void validate_shape(const Shape& shape);

double shape_area(const Shape& shape);

/// Signed distance to the boundary: positive inside, negative outside.
double signed_distance(const Shape& shape, Point x);

/// Largest distance from `x` to a boundary point.
double max_boundary_distance(const Shape& shape, Point x);

/// Parses `disk:R`, `disk:cx,cy,R`, `square:S`, `rect:x0,y0,x1,y1`,
/// `lshape:x0,y0,x1,y1,nx,ny` and `polygon:x,y;x,y;...`.
Shape parse_shape(std::string_view text);
std::string shape_to_string(const Shape& shape);

/// Returns a copy of the shape scaled about the origin.
Shape scale_shape(const Shape& shape, double factor);

using NodeId = std::int32_t;

/// Lattice cell given by its four corner nodes; split into the triangles
/// (sw, se, ne) and (sw, ne, nw).
struct Cell {
  NodeId sw, se, nw, ne;
};

/// Uniform-grid discretization of a shape. Immutable after construction.
///
/// Interior nodes lie strictly inside the shape. Boundary nodes are the
/// remaining lattice nodes that touch an interior node through the
/// 8-neighborhood; they carry rho = 0. Every such neighbor pair crosses the
/// boundary, so rho stays discretely 1-Lipschitz.
class Domain {
 public:
  Domain(Shape shape, double h);

  const Shape& shape() const { return shape_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t node_count() const { return static_cast<std::size_t>(nx_) * ny_; }
  Point origin() const { return origin_; }
  double area() const { return area_; }

  NodeId node(int i, int j) const { return static_cast<NodeId>(j * nx_ + i); }
  int col(NodeId n) const { return n % nx_; }
  int row(NodeId n) const { return n / nx_; }
  Point point(NodeId n) const {
    return {origin_.x + col(n) * h_, origin_.y + row(n) * h_};
  }
  /// Lattice node nearest to `x` (clamped to the grid).
  NodeId nearest_node(Point x) const;

  bool is_interior(NodeId n) const { return interior_[n] != 0; }
  bool is_boundary(NodeId n) const { return boundary_[n] != 0; }
  std::span<const std::uint8_t> interior_mask() const { return interior_; }
  std::span<const std::uint8_t> boundary_mask() const { return boundary_; }

  /// Interior nodes in increasing id order; position in this list is the unknown index.
  std::span<const NodeId> interior_nodes() const { return interior_nodes_; }
  /// Unknown index of a node, or -1 for non-interior nodes.
  std::int32_t unknown_index(NodeId n) const { return unknown_[n]; }

  /// Cells with at least one interior corner.
  std::span<const Cell> cells() const { return cells_; }
  double triangle_area() const { return 0.5 * h_ * h_; }
  /// Lumped nodal quadrature weights (cell-share area).
  std::span<const double> node_weights() const { return weights_; }

  std::span<const double> rho() const { return rho_; }
  double rho_max() const { return rho_max_; }

  /// Stable 64-bit hash of the shape, spacing and lattice layout.
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

 private:
  Shape shape_;
  double h_;
  int nx_ = 0;
  int ny_ = 0;
  Point origin_;
  double area_ = 0.0;
  std::vector<std::uint8_t> interior_;
  std::vector<std::uint8_t> boundary_;
  std::vector<NodeId> interior_nodes_;
  std::vector<std::int32_t> unknown_;
  std::vector<Cell> cells_;
  std::vector<double> weights_;
  std::vector<double> rho_;
  double rho_max_ = 0.0;
  std::uint64_t hash_ = 0;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr build_domain(const Shape& shape, double h);

/// 1 / max rho.
double lambda_inf_cap(const Domain& domain);

struct RhoMaximizers {
  std::vector<NodeId> nodes;
  /// Node of largest rho; ties go to the one nearest the centroid of `nodes`.
  NodeId primary = -1;
  double max_rho = 0.0;
  double diameter = 0.0;
  bool unique = false;
};

/// Interior nodes with rho within h/2 of its maximum; unique when the set has diameter <= 2h.
RhoMaximizers rho_maximizers(const Domain& domain);

/// Largest diameter of a node set.
double node_set_diameter(const Domain& domain, std::span<const NodeId> nodes);

}  // namespace pqlab
