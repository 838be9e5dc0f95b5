#include "rivercover/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

namespace rivercover {

bool line_of_sight(const RiverMap& map, Vec2 a, Vec2 b) {
  const double res = map.resolution();
  const Vec2 o = map.origin();
  // Grid coordinates with cell (i, j) spanning [i, i+1) x [j, j+1).
  const double x0 = (a.x - o.x) / res, y0 = (a.y - o.y) / res;
  const double x1 = (b.x - o.x) / res, y1 = (b.y - o.y) / res;
  int i = static_cast<int>(std::floor(x0)), j = static_cast<int>(std::floor(y0));
  const int i_end = static_cast<int>(std::floor(x1)), j_end = static_cast<int>(std::floor(y1));
  if (!map.is_free(i, j)) return false;
  const double dx = x1 - x0, dy = y1 - y0;
  const int si = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sj = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  const double tdx = si != 0 ? std::abs(1.0 / dx) : inf;
  const double tdy = sj != 0 ? std::abs(1.0 / dy) : inf;
  double tx = si > 0 ? (std::floor(x0) + 1 - x0) * tdx : (si < 0 ? (x0 - std::floor(x0)) * tdx : inf);
  double ty = sj > 0 ? (std::floor(y0) + 1 - y0) * tdy : (sj < 0 ? (y0 - std::floor(y0)) * tdy : inf);
  const int max_steps = std::abs(i_end - i) + std::abs(j_end - j) + 2;
  for (int step = 0; step < max_steps && (i != i_end || j != j_end); ++step) {
    if (std::abs(tx - ty) < 1e-12) {
      // Through a corner: both side cells are touched.
      if (!map.is_free(i + si, j) || !map.is_free(i, j + sj)) return false;
      i += si;
      j += sj;
      tx += tdx;
      ty += tdy;
    } else if (tx < ty) {
      if (tx > 1.0) break;
      i += si;
      tx += tdx;
    } else {
      if (ty > 1.0) break;
      j += sj;
      ty += tdy;
    }
    if (!map.is_free(i, j)) return false;
  }
  return true;
}

Vec2 snap_to_free(const RiverMap& map, Vec2 p) {
  const CellIndex c = map.cell_of(p);
  if (map.is_free(c.i, c.j)) return p;
  for (int r = 1; r < std::max(map.width(), map.height()); ++r) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 hit{};
    for (int dj = -r; dj <= r; ++dj)
      for (int di = -r; di <= r; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != r || !map.is_free(c.i + di, c.j + dj)) continue;
        const Vec2 q = map.cell_center(c.i + di, c.j + dj);
        if (distance(p, q) < best) {
          best = distance(p, q);
          hit = q;
        }
      }
    if (best < std::numeric_limits<double>::infinity()) return hit;
  }
  return p;
}

std::optional<Polyline> free_space_path(const RiverMap& map, Vec2 from, Vec2 to) {
  from = snap_to_free(map, from);
  to = snap_to_free(map, to);
  if (line_of_sight(map, from, to)) return Polyline{from, to};

  const int w = map.width(), h = map.height();
  const CellIndex s = map.cell_of(from), g = map.cell_of(to);
  if (!map.is_free(s.i, s.j) || !map.is_free(g.i, g.j)) return std::nullopt;
  const auto idx = [w](int i, int j) { return static_cast<std::size_t>(j) * w + i; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(static_cast<std::size_t>(w) * h, inf);
  std::vector<std::int64_t> parent(cost.size(), -1);
  const auto heuristic = [&](int i, int j) {
    const double ax = std::abs(i - g.i), ay = std::abs(j - g.j);
    return (std::max(ax, ay) - std::min(ax, ay)) + std::sqrt(2.0) * std::min(ax, ay);
  };
  using Node = std::pair<double, std::size_t>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  cost[idx(s.i, s.j)] = 0.0;
  open.push({heuristic(s.i, s.j), idx(s.i, s.j)});
  bool found = false;
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    const int ci = static_cast<int>(cur % w), cj = static_cast<int>(cur / w);
    if (f > cost[cur] + heuristic(ci, cj) + 1e-9) continue;
    if (ci == g.i && cj == g.j) {
      found = true;
      break;
    }
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ni = ci + di, nj = cj + dj;
        if (!map.is_free(ni, nj)) continue;
        if (di != 0 && dj != 0 && (!map.is_free(ci + di, cj) || !map.is_free(ci, cj + dj))) continue;
        const double c = cost[cur] + (di != 0 && dj != 0 ? std::sqrt(2.0) : 1.0);
        const std::size_t n = idx(ni, nj);
        if (c < cost[n] - 1e-12) {
          cost[n] = c;
          parent[n] = static_cast<std::int64_t>(cur);
          open.push({c + heuristic(ni, nj), n});
        }
      }
  }
  if (!found) return std::nullopt;

  Polyline cells;
  for (std::int64_t k = static_cast<std::int64_t>(idx(g.i, g.j)); k >= 0; k = parent[static_cast<std::size_t>(k)])
    cells.push_back(map.cell_center(static_cast<int>(k % w), static_cast<int>(k / w)));
  std::reverse(cells.begin(), cells.end());
  cells.front() = from;
  cells.back() = to;

  // Greedy string pulling: from each anchor jump to the farthest visible vertex.
  Polyline out{from};
  std::size_t anchor = 0;
  while (anchor + 1 < cells.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t k = cells.size() - 1; k > anchor + 1; --k)
      if (line_of_sight(map, cells[anchor], cells[k])) {
        next = k;
        break;
      }
    out.push_back(cells[next]);
    anchor = next;
  }
  return out;
}

}  // namespace rivercover
