#pragma once

// Marching squares on a regular grid with segment chaining.
//
// Shared by the quadrature-grade implicit tracer (geometry) and the
// diagnostic level-set renderer (render).

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/error.hpp"

namespace gptshape {

struct Box {
  double xmin = -4.0;
  double xmax = 4.0;
  double ymin = -4.0;
  double ymax = 4.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

struct Polyline {
  std::vector<Eigen::Vector2d> points;
  bool closed = false;
};

namespace detail {

// Edge ids: horizontal edge from vertex (i, j) to (i+1, j) is 2*(j*(n+1)+i),
// vertical edge from (i, j) to (i, j+1) is 2*(j*(n+1)+i)+1.
inline std::int64_t h_edge(int i, int j, int n) { return 2 * (static_cast<std::int64_t>(j) * (n + 1) + i); }
inline std::int64_t v_edge(int i, int j, int n) { return h_edge(i, j, n) + 1; }

} // namespace detail

/// Traces {f = level} on an n x n cell grid over box. Vertices are placed by
/// linear interpolation along cell edges. Saddle cells are split using the
/// cell-center value. Chains that do not close end on the box boundary.
inline std::vector<Polyline> marching_squares(const std::function<double(const Eigen::Vector2d&)>& f,
                                              const Box& box, int n, double level) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid must have at least 2 cells per side");
  const double hx = box.width() / n, hy = box.height() / n;
  auto vertex = [&](int i, int j) { return Eigen::Vector2d(box.xmin + i * hx, box.ymin + j * hy); };

  std::vector<double> val((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double v = f(vertex(i, j)) - level;
      val[j * (n + 1) + i] = v;
    }
  auto at = [&](int i, int j) { return val[j * (n + 1) + i]; };
  auto above = [&](double v) { return v >= 0.0; };

  std::unordered_map<std::int64_t, Eigen::Vector2d> crossing;
  auto edge_point = [&](std::int64_t id) -> const Eigen::Vector2d& {
    auto it = crossing.find(id);
    if (it != crossing.end()) return it->second;
    const std::int64_t base = id / 2;
    const int i = static_cast<int>(base % (n + 1)), j = static_cast<int>(base / (n + 1));
    const int i2 = (id % 2 == 0) ? i + 1 : i, j2 = (id % 2 == 0) ? j : j + 1;
    const double v0 = at(i, j), v1 = at(i2, j2);
    const double t = v0 / (v0 - v1);
    return crossing.emplace(id, vertex(i, j) + t * (vertex(i2, j2) - vertex(i, j))).first->second;
  };

  // Each crossing edge is shared by at most two segments.
  std::unordered_map<std::int64_t, std::array<std::int64_t, 2>> links;
  auto link = [&](std::int64_t a, std::int64_t b) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      auto [it, fresh] = links.try_emplace(x, std::array<std::int64_t, 2>{-1, -1});
      (it->second[0] < 0 ? it->second[0] : it->second[1]) = y;
    }
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      const int code = (above(v00) ? 1 : 0) | (above(v10) ? 2 : 0) | (above(v11) ? 4 : 0) | (above(v01) ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const std::int64_t bottom = detail::h_edge(i, j, n), top = detail::h_edge(i, j + 1, n);
      const std::int64_t left = detail::v_edge(i, j, n), right = detail::v_edge(i + 1, j, n);
      switch (code) {
      case 1: case 14: link(left, bottom); break;
      case 2: case 13: link(bottom, right); break;
      case 3: case 12: link(left, right); break;
      case 4: case 11: link(right, top); break;
      case 6: case 9: link(bottom, top); break;
      case 7: case 8: link(left, top); break;
      case 5: case 10: {
        const bool center_above = above(0.25 * (v00 + v10 + v11 + v01));
        // code 5: corners 00 and 11 above. If the center agrees with them they connect through it.
        const bool join_diag_00_11 = (code == 5) == center_above;
        if (join_diag_00_11) {
          link(left, top);
          link(bottom, right);
        } else {
          link(left, bottom);
          link(right, top);
        }
        break;
      }
      default: break;
      }
    }
  }

  // Deterministic walk order: ascending edge id.
  std::vector<std::int64_t> ids;
  ids.reserve(links.size());
  for (const auto& [id, _] : links) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  std::unordered_map<std::int64_t, bool> used;
  auto walk = [&](std::int64_t start, std::int64_t prev) {
    std::vector<std::int64_t> chain{start};
    std::int64_t cur = start;
    while (true) {
      used[cur] = true;
      const auto& nb = links.at(cur);
      std::int64_t next = nb[0] != prev ? nb[0] : nb[1];
      if (nb[0] == nb[1]) next = nb[0] == prev ? -1 : nb[0];
      if (next < 0) break;
      if (next == start) {
        chain.push_back(start);
        break;
      }
      if (used[next]) break;
      prev = cur;
      cur = next;
      chain.push_back(cur);
    }
    return chain;
  };

  std::vector<Polyline> out;
  // Open chains first: start from endpoints (edges with a single link).
  for (auto id : ids) {
    if (used[id]) continue;
    const auto& nb = links.at(id);
    if (nb[1] >= 0) continue;
    auto chain = walk(id, -1);
    Polyline pl;
    for (auto e : chain) pl.points.push_back(edge_point(e));
    out.push_back(std::move(pl));
  }
  for (auto id : ids) {
    if (used[id]) continue;
    auto chain = walk(id, -1);
    Polyline pl;
    pl.closed = chain.size() > 2 && chain.front() == chain.back();
    if (pl.closed) chain.pop_back();
    for (auto e : chain) pl.points.push_back(edge_point(e));
    out.push_back(std::move(pl));
  }
  return out;
}

} // namespace gptshape
