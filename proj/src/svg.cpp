#include "pqlab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pqlab/error.hpp"

namespace pqlab {

namespace {

constexpr double kPixels = 480.0;
constexpr double kMargin = 20.0;

// Blue to red ramp.
std::string level_color(int k) {
  const double s = static_cast<double>(k) / (kContourLevels - 1);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 * s), 40, static_cast<int>(255 * (1 - s)));
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string contour_svg(const ScalarField& u, const std::string& title) {
  const Domain& d = u.domain();
  const double span = std::max(d.nx() - 1, d.ny() - 1) * d.h();
  const double scale = span > 0 ? kPixels / span : 1.0;
  const double width = (d.nx() - 1) * d.h() * scale + 2 * kMargin;
  const double height = (d.ny() - 1) * d.h() * scale + 2 * kMargin + 20;
  auto sx = [&](double x) { return kMargin + (x - d.origin().x) * scale; };
  auto sy = [&](double y) { return kMargin + 20 + ((d.ny() - 1) * d.h() - (y - d.origin().y)) * scale; };

  double top = 0.0;
  for (double v : u.values()) top = std::max(top, std::fabs(v));

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt(kMargin) + "\" y=\"16\" font-family=\"monospace\" font-size=\"12\">" + escape(title) +
         " max=" + fmt(top) + "</text>\n";

  // Domain outline: boundary nodes as small dots.
  out += "<g fill=\"#888888\">\n";
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    if (!d.is_boundary(static_cast<NodeId>(n))) continue;
    const Point p = d.point(static_cast<NodeId>(n));
    out += "<circle cx=\"" + fmt(sx(p.x)) + "\" cy=\"" + fmt(sy(p.y)) + "\" r=\"0.8\"/>\n";
  }
  out += "</g>\n";

  if (top > 0) {
    for (int k = 0; k < kContourLevels; ++k) {
      const double level = (k + 0.5) * top / kContourLevels;
      std::string path;
      for (const Cell& c : d.cells()) {
        const std::array<std::array<NodeId, 3>, 2> tris{{{c.sw, c.se, c.ne}, {c.sw, c.ne, c.nw}}};
        for (const auto& t : tris) {
          std::array<Point, 2> hit{};
          int count = 0;
          for (int e = 0; e < 3 && count < 2; ++e) {
            const NodeId a = t[e], b = t[(e + 1) % 3];
            const double fa = std::fabs(u[a]) - level, fb = std::fabs(u[b]) - level;
            if ((fa < 0) == (fb < 0)) continue;
            const double s = fa / (fa - fb);
            const Point pa = d.point(a), pb = d.point(b);
            hit[count++] = {pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y)};
          }
          if (count == 2)
            path += "M" + fmt(sx(hit[0].x)) + " " + fmt(sy(hit[0].y)) + "L" + fmt(sx(hit[1].x)) + " " +
                    fmt(sy(hit[1].y));
        }
      }
      if (!path.empty())
        out += "<path fill=\"none\" stroke-width=\"1\" stroke=\"" + level_color(k) + "\" d=\"" + path + "\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

void write_contour_svg(const std::string& path, const ScalarField& u, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << contour_svg(u, title);
}

}  // namespace pqlab
