#include "rivercover/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rivercover {

Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  if (n == 0.0) return {};
  return v / n;
}

double angle_between(Vec2 a, Vec2 b) {
  return std::abs(std::atan2(cross(a, b), dot(a, b)));
}

double polyline_length(std::span<const Vec2> pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
  return total;
}

std::vector<double> cumulative_arc_lengths(std::span<const Vec2> pts) {
  std::vector<double> arcs(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) arcs[i] = arcs[i - 1] + distance(pts[i - 1], pts[i]);
  return arcs;
}

SegmentFoot closest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  const Vec2 foot = a + ab * t;
  return {foot, t, distance(p, foot)};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) { return closest_on_segment(p, a, b).dist; }

std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2) {
  const double den = cross(d1, d2);
  if (std::abs(den) < 1e-15 * norm(d1) * norm(d2)) return std::nullopt;
  const double t = cross(p2 - p1, d2) / den;
  return p1 + d1 * t;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double signed_area(std::span<const Vec2> ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2 p = ring[i];
    const Vec2 q = ring[(i + 1) % ring.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

bool point_in_rings(Vec2 p, const std::vector<Polyline>& rings) {
  bool inside = false;
  for (const auto& ring : rings) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = ring[i];
      const Vec2 b = ring[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside;
}

bool is_simple(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  if (n < 4) return true;
  // Segments are bucketed on a coarse grid so long polylines stay near-linear.
  double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    minx = std::min(minx, pts[i].x);
    maxx = std::max(maxx, pts[i].x);
    miny = std::min(miny, pts[i].y);
    maxy = std::max(maxy, pts[i].y);
    if (i > 0) total += distance(pts[i - 1], pts[i]);
  }
  const double cell = std::max(total / static_cast<double>(n - 1) * 4.0, 1e-9);
  const int nx = static_cast<int>((maxx - minx) / cell) + 1;
  const int ny = static_cast<int>((maxy - miny) / cell) + 1;
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(nx) * ny);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int x0 = static_cast<int>((std::min(pts[i].x, pts[i + 1].x) - minx) / cell);
    const int x1 = static_cast<int>((std::max(pts[i].x, pts[i + 1].x) - minx) / cell);
    const int y0 = static_cast<int>((std::min(pts[i].y, pts[i + 1].y) - miny) / cell);
    const int y1 = static_cast<int>((std::max(pts[i].y, pts[i + 1].y) - miny) / cell);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) buckets[static_cast<std::size_t>(y) * nx + x].push_back(i);
  }
  for (const auto& bucket : buckets) {
    for (std::size_t a = 0; a < bucket.size(); ++a) {
      for (std::size_t b = a + 1; b < bucket.size(); ++b) {
        const std::size_t i = bucket[a];
        const std::size_t j = bucket[b];
        if (j <= i + 1) continue;
        if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) return false;
      }
    }
  }
  return true;
}

Polyline douglas_peucker(std::span<const Vec2> pts, double tolerance) {
  const std::size_t n = pts.size();
  if (n <= 2) return Polyline(pts.begin(), pts.end());
  std::vector<bool> keep(n, false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t index = first;
    for (std::size_t i = first + 1; i < last; ++i) {
      const double d = point_segment_distance(pts[i], pts[first], pts[last]);
      if (d > worst) {
        worst = d;
        index = i;
      }
    }
    if (worst > tolerance) {
      keep[index] = true;
      stack.emplace_back(first, index);
      stack.emplace_back(index, last);
    }
  }
  Polyline out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

double max_deviation(std::span<const Vec2> original, std::span<const Vec2> simplified) {
  double worst = 0.0;
  for (const Vec2 p : original) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < simplified.size(); ++i)
      best = std::min(best, point_segment_distance(p, simplified[i], simplified[i + 1]));
    if (simplified.size() == 1) best = distance(p, simplified[0]);
    worst = std::max(worst, best);
  }
  return worst;
}

Polyline resample_uniform(std::span<const Vec2> pts, double spacing) {
  if (pts.size() < 2 || spacing <= 0.0) return Polyline(pts.begin(), pts.end());
  ArcPolyline arc{Polyline(pts.begin(), pts.end())};
  const double len = arc.length();
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / spacing)));
  Polyline out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(arc.at(len * static_cast<double>(i) / steps));
  out.back() = pts.back();
  return out;
}

Polyline moving_average(std::span<const Vec2> pts, int window) {
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
  Polyline out(pts.begin(), pts.end());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 1; i + 1 < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    Vec2 sum{};
    for (std::ptrdiff_t k = -h; k <= h; ++k) sum += pts[i + k];
    out[i] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

Polyline dedupe(std::span<const Vec2> pts, double eps) {
  Polyline out;
  for (const Vec2 p : pts)
    if (out.empty() || distance(out.back(), p) > eps) out.push_back(p);
  return out;
}

ArcPolyline::ArcPolyline(Polyline pts) : points_(std::move(pts)), arcs_(cumulative_arc_lengths(points_)) {}

std::size_t ArcPolyline::segment_index(double s) const {
  if (points_.size() < 2) return 0;
  auto it = std::upper_bound(arcs_.begin(), arcs_.end(), s);
  std::size_t i = it == arcs_.begin() ? 0 : static_cast<std::size_t>(it - arcs_.begin()) - 1;
  return std::min(i, points_.size() - 2);
}

Vec2 ArcPolyline::at(double s) const {
  if (points_.empty()) throw std::logic_error("ArcPolyline::at on empty polyline");
  if (points_.size() == 1) return points_.front();
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(s);
  const double seg = arcs_[i + 1] - arcs_[i];
  const double t = seg > 0.0 ? (s - arcs_[i]) / seg : 0.0;
  return lerp(points_[i], points_[i + 1], t);
}

ArcPolyline::Projection ArcPolyline::project(Vec2 p, double lo, double hi) const {
  Projection best{points_.front(), 0.0, std::numeric_limits<double>::infinity()};
  if (points_.size() == 1) return {points_.front(), 0.0, distance(p, points_.front())};
  lo = std::clamp(lo, 0.0, length());
  hi = std::clamp(hi, lo, length());
  const std::size_t i0 = segment_index(lo);
  const std::size_t i1 = segment_index(hi);
  for (std::size_t i = i0; i <= i1; ++i) {
    const double a0 = std::max(arcs_[i], lo);
    const double a1 = std::min(arcs_[i + 1], hi);
    const Vec2 pa = at(a0);
    const Vec2 pb = at(a1);
    const SegmentFoot foot = closest_on_segment(p, pa, pb);
    if (foot.dist < best.dist) best = {foot.point, a0 + (a1 - a0) * foot.t, foot.dist};
  }
  return best;
}

Polyline ArcPolyline::slice(double lo, double hi) const {
  Polyline out;
  if (points_.empty()) return out;
  lo = std::clamp(lo, 0.0, length());
  hi = std::clamp(hi, lo, length());
  out.push_back(at(lo));
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (arcs_[i] > lo && arcs_[i] < hi) out.push_back(points_[i]);
  out.push_back(at(hi));
  return dedupe(out, 0.0);
}

ArcPolyline ArcPolyline::reversed() const {
  Polyline r(points_.rbegin(), points_.rend());
  return ArcPolyline(std::move(r));
}

}  // namespace rivercover
