#pragma once

// Independent checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rivercover/contours.hpp"
#include "rivercover/meander.hpp"
#include "rivercover/synthetic.hpp"

namespace rivercover::oracle {

// Signed heading change of the analytic centreline between two arcs.
struct AnalyticTurning {
  ArcPolyline line;
  std::vector<double> heading;  // unwrapped, per segment

  explicit AnalyticTurning(const Polyline& c) : line(c) {
    constexpr double pi = std::numbers::pi;
    double prev = 0.0;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      const Vec2 d = c[k + 1] - c[k];
      double h = std::atan2(d.y, d.x);
      if (k > 0) {
        while (h - prev > pi) h -= 2 * pi;
        while (h - prev < -pi) h += 2 * pi;
      }
      heading.push_back(h);
      prev = h;
    }
  }
  double heading_at(double s) const {
    const std::size_t k = std::min(line.segment_index(std::clamp(s, 0.0, line.length())), heading.size() - 1);
    return heading[k];
  }
  double turning(double s0, double s1) const { return heading_at(s1) - heading_at(s0); }
};

struct BendScore {
  int agree = 0;
  int total = 0;
  double rate() const { return total ? static_cast<double>(agree) / total : 0.0; }
};

// Inner iff the curvature centre is on the land side of the bank: left-turning
// reaches have their inner bank on the left. Points where the analytic centreline
// turns by less than a degree over the window are skipped.
inline BendScore score_bends(const synthetic::SyntheticRiver& river, double res) {
  RiverMap m = river.rasterize(res);
  const auto c = get_directional_contours(m, river.start());
  const TangentStep step = default_tangent_step(c);
  const AnalyticTurning turning(river.centerline);
  BendScore sc;
  for (const auto& l : classify_banks(m, c, step)) {
    if (l.label == BendLabel::Straight) continue;
    const double s = turning.line.project(l.point).arc;
    const double turn = turning.turning(s - step.delta_w, s + step.delta_w);
    if (std::abs(turn) < std::numbers::pi / 180.0) continue;
    const bool left_turn = turn > 0.0;
    const BendLabel expected = (l.bank == Bank::Left) == left_turn ? BendLabel::Inner : BendLabel::Outer;
    sc.agree += l.label == expected;
    ++sc.total;
  }
  return sc;
}

// Fraction of Free cells within `radius` of the path, from a vector-propagation
// distance transform seeded with path samples every quarter cell. Each cell carries
// its nearest seed point; two raster passes propagate it to the 8-neighbours.
inline double covered_fraction_dt(const RiverMap& map, const Polyline& path, double radius) {
  const int w = map.width(), h = map.height();
  const double res = map.resolution();
  const Vec2 o = map.origin();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Vec2> nearest(static_cast<std::size_t>(w) * h, Vec2{inf, inf});
  std::vector<double> d2(nearest.size(), inf);
  const auto idx = [w](int i, int j) { return static_cast<std::size_t>(j) * w + i; };
  const auto offer = [&](int i, int j, Vec2 p) {
    const std::size_t k = idx(i, j);
    const Vec2 c = map.cell_center(i, j);
    const double dd = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
    if (dd < d2[k]) d2[k] = dd, nearest[k] = p;
  };
  const auto seed = [&](Vec2 p) {
    const int i = static_cast<int>(std::floor((p.x - o.x) / res)), j = static_cast<int>(std::floor((p.y - o.y) / res));
    if (i >= 0 && j >= 0 && i < w && j < h) offer(i, j, p);
  };
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Vec2 a = path[k], b = path[k + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / (0.25 * res))));
    for (int q = 0; q <= n; ++q) seed(lerp(a, b, static_cast<double>(q) / n));
  }
  if (path.size() == 1) seed(path[0]);
  const auto pull = [&](int i, int j, int di, int dj) {
    const int ni = i + di, nj = j + dj;
    if (ni < 0 || nj < 0 || ni >= w || nj >= h) return;
    const Vec2 p = nearest[idx(ni, nj)];
    if (std::isfinite(p.x)) offer(i, j, p);
  };
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) pull(i, j, -1, 0), pull(i, j, -1, -1), pull(i, j, 0, -1), pull(i, j, 1, -1);
    for (int i = w - 1; i >= 0; --i) pull(i, j, 1, 0);
  }
  for (int j = h - 1; j >= 0; --j) {
    for (int i = w - 1; i >= 0; --i) pull(i, j, 1, 0), pull(i, j, 1, 1), pull(i, j, 0, 1), pull(i, j, -1, 1);
    for (int i = 0; i < w; ++i) pull(i, j, -1, 0);
  }
  std::size_t covered = 0, free = 0;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      if (map.is_free(i, j)) {
        ++free;
        covered += d2[idx(i, j)] <= radius * radius;
      }
  return free ? static_cast<double>(covered) / free : 0.0;
}

}  // namespace rivercover::oracle
