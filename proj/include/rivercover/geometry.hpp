#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rivercover {

/// Point or vector in the metric map frame (x east, y north, meters).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline constexpr Vec2 perp_left(Vec2 v) { return {-v.y, v.x}; }
inline constexpr Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }

/// Unit vector along v; zero vector stays zero.
Vec2 normalized(Vec2 v);

/// Unsigned angle between two directions, radians in [0, pi].
double angle_between(Vec2 a, Vec2 b);

using Polyline = std::vector<Vec2>;

double polyline_length(std::span<const Vec2> pts);
std::vector<double> cumulative_arc_lengths(std::span<const Vec2> pts);

/// Closest point on segment [a, b] to p; t is the segment parameter in [0, 1].
struct SegmentFoot {
  Vec2 point;
  double t = 0.0;
  double dist = 0.0;
};
SegmentFoot closest_on_segment(Vec2 p, Vec2 a, Vec2 b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Intersection of the infinite lines p1 + t*d1 and p2 + u*d2.
std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2);

/// Proper or touching intersection of closed segments [a, b] and [c, d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Shoelace area; positive for counter-clockwise rings. The ring is implicitly closed.
double signed_area(std::span<const Vec2> ring);

/// Even-odd point-in-polygon over all rings.
bool point_in_rings(Vec2 p, const std::vector<Polyline>& rings);

/// True if no two non-adjacent segments of the open polyline intersect.
bool is_simple(std::span<const Vec2> pts);

/// Ramer-Douglas-Peucker simplification; always keeps both endpoints.
Polyline douglas_peucker(std::span<const Vec2> pts, double tolerance);

/// Max distance of any input vertex to the simplified polyline.
double max_deviation(std::span<const Vec2> original, std::span<const Vec2> simplified);

/// Resample at (nearly) uniform arc spacing, keeping the endpoints exactly.
Polyline resample_uniform(std::span<const Vec2> pts, double spacing);

/// Centered moving average over `window` vertices (odd); endpoints stay fixed and
/// the window shrinks symmetrically near them.
Polyline moving_average(std::span<const Vec2> pts, int window);

/// Removes consecutive vertices closer than eps.
Polyline dedupe(std::span<const Vec2> pts, double eps = 1e-9);

/// A polyline with its arc-length parameterization.
class ArcPolyline {
 public:
  ArcPolyline() = default;
  explicit ArcPolyline(Polyline pts);

  const Polyline& points() const { return points_; }
  const std::vector<double>& arcs() const { return arcs_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double length() const { return arcs_.empty() ? 0.0 : arcs_.back(); }
  Vec2 front() const { return points_.front(); }
  Vec2 back() const { return points_.back(); }

  /// Point at arc length s (clamped to [0, length]).
  Vec2 at(double s) const;

  /// Index i such that arcs[i] <= s <= arcs[i + 1].
  std::size_t segment_index(double s) const;

  struct Projection {
    Vec2 point;
    double arc = 0.0;
    double dist = 0.0;
  };
  /// Closest point restricted to arcs within [lo, hi].
  Projection project(Vec2 p, double lo, double hi) const;
  Projection project(Vec2 p) const { return project(p, 0.0, length()); }

  /// Vertices strictly between arcs lo and hi, bracketed by the interpolated endpoints.
  Polyline slice(double lo, double hi) const;

  ArcPolyline reversed() const;

 private:
  Polyline points_;
  std::vector<double> arcs_;
};

}  // namespace rivercover
