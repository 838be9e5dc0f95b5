#pragma once

#include <functional>
#include <span>

#include "rivercover/geometry.hpp"
#include "rivercover/river_map.hpp"

namespace rivercover::synthetic {

/// Analytic river band: a centreline with a width function, offset along its normals.
/// The polygon's two end caps are declared as open edges.
struct SyntheticRiver {
  RiverPolygon polygon;
  Polyline centerline;
  std::vector<double> widths;
  Polyline left_bank;   // left of the centreline direction
  Polyline right_bank;

  Vec2 start() const { return centerline.front(); }
  Vec2 finish() const { return centerline.back(); }
  double length() const { return polyline_length(centerline); }
  RiverMap rasterize(double resolution) const { return rasterize_polygon(polygon, resolution); }
};

using ArcFunction = std::function<double(double)>;

SyntheticRiver band(std::span<const Vec2> centerline, const ArcFunction& width_at_arc);

SyntheticRiver straight(double length, double width);
/// Centreline y = amplitude * sin(2*pi*x / wavelength), x in [0, length].
SyntheticRiver sine(double length, double amplitude, double wavelength, double width, double step = 1.0);
/// Straight reach whose width changes linearly from w0 to w1.
SyntheticRiver taper(double length, double w0, double w1);
/// Counter-clockwise circular bend about the origin; the left bank is the inner one.
SyntheticRiver annulus(double r_inner, double r_outer, double sweep_rad);
/// Centreline integrated from a curvature function of arc length, starting at the
/// origin heading +x.
SyntheticRiver from_curvature(double length, const ArcFunction& curvature, const ArcFunction& width,
                              double step = 1.0);
/// Two opposite circular bends followed by a straight tail.
SyntheticRiver s_curve(double radius, double sweep_rad, double tail, double width);

}  // namespace rivercover::synthetic
