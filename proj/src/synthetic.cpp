#include "rivercover/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "rivercover/errors.hpp"

namespace rivercover::synthetic {

SyntheticRiver band(std::span<const Vec2> centerline, const ArcFunction& width_at_arc) {
  if (centerline.size() < 2) throw ValidationError("synthetic centreline needs >= 2 points");
  SyntheticRiver r;
  r.centerline.assign(centerline.begin(), centerline.end());
  const auto arcs = cumulative_arc_lengths(centerline);
  const std::size_t n = centerline.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = centerline[k == 0 ? 0 : k - 1];
    const Vec2 b = centerline[k + 1 == n ? n - 1 : k + 1];
    const Vec2 normal = perp_left(normalized(b - a));
    const double w = width_at_arc(arcs[k]);
    r.widths.push_back(w);
    r.left_bank.push_back(centerline[k] + normal * (0.5 * w));
    r.right_bank.push_back(centerline[k] - normal * (0.5 * w));
  }
  Polyline ring = r.right_bank;
  ring.insert(ring.end(), r.left_bank.rbegin(), r.left_bank.rend());
  r.polygon.rings = {ring};
  // Edge n-1 joins the last right-bank vertex to the last left-bank vertex; the final
  // edge closes from the first left-bank vertex back to the first right-bank vertex.
  r.polygon.open_edges = {static_cast<int>(n - 1), static_cast<int>(2 * n - 1)};
  return r;
}

SyntheticRiver straight(double length, double width) {
  Polyline c;
  const int steps = std::max(2, static_cast<int>(std::ceil(length / 10.0)));
  for (int k = 0; k <= steps; ++k) c.push_back({length * k / steps, 0.0});
  return band(c, [width](double) { return width; });
}

SyntheticRiver sine(double length, double amplitude, double wavelength, double width, double step) {
  Polyline c;
  const int steps = std::max(2, static_cast<int>(std::ceil(length / step)));
  const double k = 2.0 * std::numbers::pi / wavelength;
  for (int s = 0; s <= steps; ++s) {
    const double x = length * s / steps;
    c.push_back({x, amplitude * std::sin(k * x)});
  }
  return band(c, [width](double) { return width; });
}

SyntheticRiver taper(double length, double w0, double w1) {
  Polyline c;
  const int steps = std::max(2, static_cast<int>(std::ceil(length / 5.0)));
  for (int k = 0; k <= steps; ++k) c.push_back({length * k / steps, 0.0});
  return band(c, [=](double s) { return w0 + (w1 - w0) * s / length; });
}

SyntheticRiver annulus(double r_inner, double r_outer, double sweep_rad) {
  const double rc = 0.5 * (r_inner + r_outer);
  Polyline c;
  const int steps = std::max(8, static_cast<int>(std::ceil(rc * sweep_rad / 0.5)));
  for (int k = 0; k <= steps; ++k) {
    const double a = -0.5 * std::numbers::pi + sweep_rad * k / steps;
    c.push_back({rc * std::cos(a), rc * std::sin(a)});
  }
  return band(c, [=](double) { return r_outer - r_inner; });
}

SyntheticRiver from_curvature(double length, const ArcFunction& curvature, const ArcFunction& width, double step) {
  Polyline c{{0.0, 0.0}};
  double heading = 0.0;
  const int steps = std::max(2, static_cast<int>(std::ceil(length / step)));
  const double ds = length / steps;
  Vec2 p{};
  for (int k = 0; k < steps; ++k) {
    const double s = k * ds;
    // Midpoint rule on heading keeps circular arcs exact to second order.
    const double mid = heading + 0.5 * ds * curvature(s + 0.25 * ds);
    p += Vec2{std::cos(mid), std::sin(mid)} * ds;
    heading += ds * curvature(s + 0.5 * ds);
    c.push_back(p);
  }
  return band(c, width);
}

SyntheticRiver s_curve(double radius, double sweep_rad, double tail, double width) {
  const double bend = radius * sweep_rad;
  const double length = 2.0 * bend + tail;
  return from_curvature(
      length,
      [=](double s) {
        if (s < bend) return 1.0 / radius;
        if (s < 2.0 * bend) return -1.0 / radius;
        return 0.0;
      },
      [=](double) { return width; }, 1.0);
}

}  // namespace rivercover::synthetic
