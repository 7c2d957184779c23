#pragma once

// Diagnostic level-set extraction and export. Unlike the implicit tracer in
// geometry.hpp, vertices here are plain edge interpolants (no Newton polish).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/contour.hpp"
#include "gptshape/error.hpp"
#include "gptshape/geometry.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

struct LevelSetCurve {
  std::vector<Point> points;
  bool closed = false;
  bool unbounded = false; // open curve that leaves the box
};

struct LevelSetCurves {
  std::vector<LevelSetCurve> polylines;
  Box box;
  double level = 0.0;

  std::vector<Point> vertices() const {
    std::vector<Point> v;
    for (const auto& pl : polylines) v.insert(v.end(), pl.points.begin(), pl.points.end());
    return v;
  }
  int closed_count() const {
    return static_cast<int>(std::count_if(polylines.begin(), polylines.end(), [](const auto& p) { return p.closed; }));
  }
};

inline LevelSetCurves extract(const Poly2& p, const Box& box, int grid, double level = 0.0) {
  if (grid < 32) throw Error(ErrorCode::InvalidArgument, "render grid must be at least 32");
  auto lines = marching_squares([&](const Eigen::Vector2d& x) { return p.eval(x); }, box, grid, level);
  if (lines.empty()) throw Error(ErrorCode::EmptyLevelSet, "level set does not cross the box");
  LevelSetCurves out;
  out.box = box;
  out.level = level;
  for (auto& l : lines) out.polylines.push_back({std::move(l.points), l.closed, !l.closed});
  return out;
}

/// Subdivides every segment so consecutive points are at most max_spacing apart.
inline std::vector<Point> densify(const LevelSetCurves& curves, double max_spacing) {
  std::vector<Point> out;
  for (const auto& pl : curves.polylines) {
    const size_t n = pl.points.size();
    const size_t segs = pl.closed ? n : (n > 0 ? n - 1 : 0);
    if (n == 1) out.push_back(pl.points[0]);
    for (size_t i = 0; i < segs; ++i) {
      const Point& a = pl.points[i];
      const Point& b = pl.points[(i + 1) % n];
      const int k = std::max(1, static_cast<int>(std::ceil((b - a).norm() / max_spacing)));
      for (int s = 0; s < k; ++s) out.push_back(a + (b - a) * (double(s) / k));
    }
    if (!pl.closed && n > 1) out.push_back(pl.points.back());
  }
  return out;
}

/// Symmetric Hausdorff distance between finite point sets (brute force).
inline double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "hausdorff needs two nonempty point sets");
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) {
        best = std::min(best, (p - q).squaredNorm());
        if (best <= worst) break; // cannot raise the max any more
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

inline std::vector<Point> boundary_points(const DiscretizedBoundary& b) {
  std::vector<Point> v;
  for (int i = 0; i < b.size(); ++i) v.push_back(b.node(i));
  return v;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace detail

struct SvgOverlay {
  std::vector<std::vector<Point>> closed_curves; // source boundary components
};

inline SvgOverlay overlay_from(const DiscretizedBoundary& b) {
  SvgOverlay o;
  o.closed_curves.resize(b.components());
  for (int i = 0; i < b.size(); ++i) o.closed_curves[b.component[i]].push_back(b.node(i));
  return o;
}

/// Standalone SVG. Byte-identical output for identical input.
inline std::string to_svg(const LevelSetCurves& curves, const std::optional<SvgOverlay>& overlay = std::nullopt) {
  const Box& box = curves.box;
  const double px = 600.0, scale = px / std::max(box.width(), box.height());
  auto X = [&](double x) { return detail::fmt((x - box.xmin) * scale); };
  auto Y = [&](double y) { return detail::fmt((box.ymax - y) * scale); };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(box.width() * scale) << "\" height=\""
    << detail::fmt(box.height() * scale) << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  if (box.xmin <= 0 && box.xmax >= 0)
    s << "<line class=\"axis\" x1=\"" << X(0) << "\" y1=\"" << Y(box.ymin) << "\" x2=\"" << X(0) << "\" y2=\""
      << Y(box.ymax) << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  if (box.ymin <= 0 && box.ymax >= 0)
    s << "<line class=\"axis\" x1=\"" << X(box.xmin) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(box.xmax) << "\" y2=\""
      << Y(0) << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  auto path = [&](const std::vector<Point>& pts, bool closed, const char* cls, const char* style) {
    if (pts.empty()) return;
    s << "<path class=\"" << cls << "\" d=\"M " << X(pts[0].x()) << " " << Y(pts[0].y());
    for (size_t i = 1; i < pts.size(); ++i) s << " L " << X(pts[i].x()) << " " << Y(pts[i].y());
    if (closed) s << " Z";
    s << "\" fill=\"none\" " << style << "/>\n";
  };
  if (overlay)
    for (const auto& c : overlay->closed_curves)
      path(c, true, "source", "stroke=\"#1f77b4\" stroke-width=\"3\" stroke-opacity=\"0.5\"");
  for (const auto& pl : curves.polylines) {
    if (pl.unbounded)
      path(pl.points, false, "unbounded", "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
    else
      path(pl.points, pl.closed, "recovered", "stroke=\"#d62728\" stroke-width=\"1.5\"");
  }
  s << "</svg>\n";
  return s.str();
}

inline void export_svg(const LevelSetCurves& curves, const std::optional<SvgOverlay>& overlay,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_svg(curves, overlay);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

/// CSV with header "component,x,y,closed,unbounded".
inline std::string to_csv(const LevelSetCurves& curves) {
  std::ostringstream s;
  s << "component,x,y,closed,unbounded\n";
  char buf[96];
  for (size_t c = 0; c < curves.polylines.size(); ++c)
    for (const auto& p : curves.polylines[c].points) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d,%d\n", c, p.x(), p.y(), curves.polylines[c].closed ? 1 : 0,
                    curves.polylines[c].unbounded ? 1 : 0);
      s << buf;
    }
  return s.str();
}

} // namespace gptshape
