#include "pqlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "pqlab/error.hpp"

namespace pqlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<Point> lshape_vertices(const LShape& s) {
  return {{s.min.x, s.min.y},   {s.max.x, s.min.y},   {s.max.x, s.notch.y},
          {s.notch.x, s.notch.y}, {s.notch.x, s.max.y}, {s.min.x, s.max.y}};
}

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double polygon_signed_area(const std::vector<Point>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](Point p, Point q, Point r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

double point_segment_distance(Point x, Point a, Point b) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len2 = ex * ex + ey * ey;
  double t = len2 > 0 ? ((x.x - a.x) * ex + (x.y - a.y) * ey) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x.x - (a.x + t * ex), x.y - (a.y + t * ey));
}

double polygon_signed_distance(const std::vector<Point>& v, Point x) {
  double dist = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point& a = v[j];
    const Point& b = v[i];
    dist = std::min(dist, point_segment_distance(x, a, b));
    if ((b.y > x.y) != (a.y > x.y)) {
      const double xc = b.x + (x.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (x.x < xc) inside = !inside;
    }
  }
  return inside ? dist : -dist;
}

void validate_polygon(const std::vector<Point>& v) {
  if (v.size() < 3) throw Error(ErrorCode::DegenerateShape, "polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i].x == v[j].x && v[i].y == v[j].y)
        throw Error(ErrorCode::DegenerateShape, "polygon has repeated vertices");
  if (!(polygon_signed_area(v) > 0))
    throw Error(ErrorCode::DegenerateShape, "polygon must be counterclockwise with positive area");
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw Error(ErrorCode::DegenerateShape, "polygon is not simple");
    }
  }
}

struct BoundingBox {
  Point min, max;
};

BoundingBox bounding_box(const Shape& shape) {
  return std::visit(
      Overloaded{
          [](const Disk& d) {
            return BoundingBox{{d.center.x - d.radius, d.center.y - d.radius},
                               {d.center.x + d.radius, d.center.y + d.radius}};
          },
          [](const Rectangle& r) { return BoundingBox{r.min, r.max}; },
          [](const LShape& l) { return BoundingBox{l.min, l.max}; },
          [](const Polygon& p) {
            BoundingBox b{p.vertices.front(), p.vertices.front()};
            for (const Point& v : p.vertices) {
              b.min.x = std::min(b.min.x, v.x);
              b.min.y = std::min(b.min.y, v.y);
              b.max.x = std::max(b.max.x, v.x);
              b.max.y = std::max(b.max.y, v.y);
            }
            return b;
          },
      },
      shape);
}

std::vector<double> parse_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  std::string buf(text);
  std::size_t pos = 0;
  while (pos <= buf.size()) {
    std::size_t next = buf.find(sep, pos);
    if (next == std::string::npos) next = buf.size();
    const std::string tok = buf.substr(pos, next - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "malformed number '" + tok + "' in shape spec");
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void validate_shape(const Shape& shape) {
  std::visit(Overloaded{
                 [](const Disk& d) {
                   if (!(d.radius > 0) || !std::isfinite(d.radius))
                     throw Error(ErrorCode::DegenerateShape, "disk radius must be positive");
                 },
                 [](const Rectangle& r) {
                   if (!(r.min.x < r.max.x && r.min.y < r.max.y))
                     throw Error(ErrorCode::DegenerateShape, "rectangle needs min < max");
                 },
                 [](const LShape& l) {
                   if (!(l.min.x < l.notch.x && l.notch.x < l.max.x && l.min.y < l.notch.y &&
                         l.notch.y < l.max.y))
                     throw Error(ErrorCode::DegenerateShape, "L-shape notch must lie strictly inside");
                 },
                 [](const Polygon& p) { validate_polygon(p.vertices); },
             },
             shape);
}

double shape_area(const Shape& shape) {
  return std::visit(Overloaded{
                        [](const Disk& d) { return M_PI * d.radius * d.radius; },
                        [](const Rectangle& r) { return (r.max.x - r.min.x) * (r.max.y - r.min.y); },
                        [](const LShape& l) { return polygon_signed_area(lshape_vertices(l)); },
                        [](const Polygon& p) { return polygon_signed_area(p.vertices); },
                    },
                    shape);
}

double signed_distance(const Shape& shape, Point x) {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return d.radius - std::hypot(x.x - d.center.x, x.y - d.center.y); },
          [&](const Rectangle& r) {
            const double dx = std::min(x.x - r.min.x, r.max.x - x.x);
            const double dy = std::min(x.y - r.min.y, r.max.y - x.y);
            if (dx >= 0 && dy >= 0) return std::min(dx, dy);
            const double ox = std::max(0.0, std::max(r.min.x - x.x, x.x - r.max.x));
            const double oy = std::max(0.0, std::max(r.min.y - x.y, x.y - r.max.y));
            return -std::hypot(ox, oy);
          },
          [&](const LShape& l) { return polygon_signed_distance(lshape_vertices(l), x); },
          [&](const Polygon& p) { return polygon_signed_distance(p.vertices, x); },
      },
      shape);
}

double max_boundary_distance(const Shape& shape, Point x) {
  auto over_vertices = [&](const std::vector<Point>& v) {
    double best = 0.0;
    for (const Point& p : v) best = std::max(best, std::hypot(p.x - x.x, p.y - x.y));
    return best;
  };
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return std::hypot(x.x - d.center.x, x.y - d.center.y) + d.radius; },
          [&](const Rectangle& r) {
            return over_vertices({r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}});
          },
          [&](const LShape& l) { return over_vertices(lshape_vertices(l)); },
          [&](const Polygon& p) { return over_vertices(p.vertices); },
      },
      shape);
}

Shape parse_shape(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::InvalidArgument, "shape spec must look like kind:params");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  Shape shape;
  if (kind == "polygon") {
    Polygon poly;
    std::string buf(rest);
    std::size_t pos = 0;
    while (pos < buf.size()) {
      std::size_t next = buf.find(';', pos);
      if (next == std::string::npos) next = buf.size();
      const auto xy = parse_numbers(std::string_view(buf).substr(pos, next - pos), ',');
      if (xy.size() != 2) throw Error(ErrorCode::InvalidArgument, "polygon vertex needs x,y");
      poly.vertices.push_back({xy[0], xy[1]});
      pos = next + 1;
    }
    shape = poly;
  } else {
    const auto v = parse_numbers(rest, ',');
    if (kind == "disk" && v.size() == 1) {
      shape = Disk{{0.0, 0.0}, v[0]};
    } else if (kind == "disk" && v.size() == 3) {
      shape = Disk{{v[0], v[1]}, v[2]};
    } else if (kind == "square" && v.size() == 1) {
      shape = Rectangle{{0.0, 0.0}, {v[0], v[0]}};
    } else if ((kind == "rect" || kind == "rectangle") && v.size() == 4) {
      shape = Rectangle{{v[0], v[1]}, {v[2], v[3]}};
    } else if (kind == "lshape" && v.size() == 6) {
      shape = LShape{{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}};
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown shape spec '" + std::string(text) + "'");
    }
  }
  validate_shape(shape);
  return shape;
}

std::string shape_to_string(const Shape& shape) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return std::visit(
      Overloaded{
          [&](const Disk& d) {
            return "disk:" + num(d.center.x) + "," + num(d.center.y) + "," + num(d.radius);
          },
          [&](const Rectangle& r) {
            return "rect:" + num(r.min.x) + "," + num(r.min.y) + "," + num(r.max.x) + "," +
                   num(r.max.y);
          },
          [&](const LShape& l) {
            return "lshape:" + num(l.min.x) + "," + num(l.min.y) + "," + num(l.max.x) + "," +
                   num(l.max.y) + "," + num(l.notch.x) + "," + num(l.notch.y);
          },
          [&](const Polygon& p) {
            std::string s = "polygon:";
            for (std::size_t i = 0; i < p.vertices.size(); ++i) {
              if (i) s += ";";
              s += num(p.vertices[i].x) + "," + num(p.vertices[i].y);
            }
            return s;
          },
      },
      shape);
}

Shape scale_shape(const Shape& shape, double f) {
  auto sp = [f](Point p) { return Point{p.x * f, p.y * f}; };
  return std::visit(Overloaded{
                        [&](const Disk& d) -> Shape { return Disk{sp(d.center), d.radius * f}; },
                        [&](const Rectangle& r) -> Shape { return Rectangle{sp(r.min), sp(r.max)}; },
                        [&](const LShape& l) -> Shape {
                          return LShape{sp(l.min), sp(l.max), sp(l.notch)};
                        },
                        [&](const Polygon& p) -> Shape {
                          Polygon out;
                          for (const Point& v : p.vertices) out.vertices.push_back(sp(v));
                          return out;
                        },
                    },
                    shape);
}

Domain::Domain(Shape shape, double h) : shape_(std::move(shape)), h_(h) {
  validate_shape(shape_);
  if (!(h_ > 0) || !std::isfinite(h_)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  const BoundingBox box = bounding_box(shape_);
  const double cells_x = std::ceil((box.max.x - box.min.x) / h_ - 1e-9);
  const double cells_y = std::ceil((box.max.y - box.min.y) / h_ - 1e-9);
  if (cells_x > 1e5 || cells_y > 1e5 || cells_x * cells_y > 5e7)
    throw Error(ErrorCode::InvalidArgument, "grid too fine");
  // One padding node on each side so outside boundary nodes exist.
  nx_ = static_cast<int>(cells_x) + 3;
  ny_ = static_cast<int>(cells_y) + 3;
  origin_ = {box.min.x - h_, box.min.y - h_};
  area_ = shape_area(shape_);

  const std::size_t n = node_count();
  std::vector<double> sd(n);
  for (std::size_t k = 0; k < n; ++k) sd[k] = signed_distance(shape_, point(static_cast<NodeId>(k)));

  const double eps = 1e-9 * h_;
  interior_.assign(n, 0);
  boundary_.assign(n, 0);
  rho_.assign(n, 0.0);
  unknown_.assign(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    const int i = col(static_cast<NodeId>(k));
    const int j = row(static_cast<NodeId>(k));
    if (i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1) continue;
    if (sd[k] > eps) interior_[k] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!interior_[k]) continue;
    const int i = col(static_cast<NodeId>(k));
    const int j = row(static_cast<NodeId>(k));
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const NodeId m = node(i + di, j + dj);
        if (!interior_[m]) boundary_[m] = 1;
      }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (interior_[k]) {
      unknown_[k] = static_cast<std::int32_t>(interior_nodes_.size());
      interior_nodes_.push_back(static_cast<NodeId>(k));
      rho_[k] = sd[k];
      rho_max_ = std::max(rho_max_, sd[k]);
    }
  }
  if (interior_nodes_.size() < 9)
    throw Error(ErrorCode::GridTooCoarse,
                "grid too coarse: " + std::to_string(interior_nodes_.size()) + " interior nodes");

  weights_.assign(n, 0.0);
  const double third = h_ * h_ / 6.0;
  for (int j = 0; j + 1 < ny_; ++j) {
    for (int i = 0; i + 1 < nx_; ++i) {
      const Cell c{node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
      if (!(interior_[c.sw] || interior_[c.se] || interior_[c.nw] || interior_[c.ne])) continue;
      cells_.push_back(c);
      weights_[c.sw] += 2 * third;
      weights_[c.ne] += 2 * third;
      weights_[c.se] += third;
      weights_[c.nw] += third;
    }
  }

  std::uint64_t hv = 1469598103934665603ULL;
  const std::string s = shape_to_string(shape_);
  hv = fnv1a(hv, s.data(), s.size());
  hv = fnv1a(hv, &h_, sizeof h_);
  hv = fnv1a(hv, &nx_, sizeof nx_);
  hv = fnv1a(hv, &ny_, sizeof ny_);
  hash_ = hv;
}

NodeId Domain::nearest_node(Point x) const {
  const int i = std::clamp(static_cast<int>(std::lround((x.x - origin_.x) / h_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::lround((x.y - origin_.y) / h_)), 0, ny_ - 1);
  return node(i, j);
}

std::string Domain::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

DomainPtr build_domain(const Shape& shape, double h) { return std::make_shared<const Domain>(shape, h); }

double lambda_inf_cap(const Domain& domain) { return 1.0 / domain.rho_max(); }

double node_set_diameter(const Domain& domain, std::span<const NodeId> nodes) {
  if (nodes.size() < 2) return 0.0;
  std::vector<Point> pts;
  pts.reserve(nodes.size());
  for (NodeId n : nodes) pts.push_back(domain.point(n));
  std::sort(pts.begin(), pts.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  // Monotone-chain hull; the diameter is attained between hull vertices.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double d = 0.0;
  for (std::size_t a = 0; a < hull.size(); ++a)
    for (std::size_t b = a + 1; b < hull.size(); ++b)
      d = std::max(d, std::hypot(hull[a].x - hull[b].x, hull[a].y - hull[b].y));
  return d;
}

RhoMaximizers rho_maximizers(const Domain& domain) {
  RhoMaximizers out;
  out.max_rho = domain.rho_max();
  const auto rho = domain.rho();
  for (NodeId n : domain.interior_nodes())
    if (rho[n] >= out.max_rho - 0.5 * domain.h()) out.nodes.push_back(n);
  double cx = 0.0, cy = 0.0;
  for (NodeId n : out.nodes) cx += domain.point(n).x, cy += domain.point(n).y;
  cx /= static_cast<double>(out.nodes.size());
  cy /= static_cast<double>(out.nodes.size());
  double best_rho = -1.0, best_dist = 0.0;
  for (NodeId n : out.nodes) {
    const Point x = domain.point(n);
    const double dist = std::hypot(x.x - cx, x.y - cy);
    if (rho[n] > best_rho || (rho[n] == best_rho && dist < best_dist)) {
      best_rho = rho[n], best_dist = dist, out.primary = n;
    }
  }
  out.diameter = node_set_diameter(domain, out.nodes);
  out.unique = out.diameter <= 2.0 * domain.h() + 1e-12;
  return out;
}

}  // namespace pqlab
