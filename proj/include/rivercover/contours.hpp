#pragma once

#include <string>
#include <vector>

#include "rivercover/geometry.hpp"
#include "rivercover/river_map.hpp"

namespace rivercover {

/// Closed iso-contour between Free and Obstacle cell centres, Free on the left
/// (outer boundary counter-clockwise). `opening[k]` marks vertices that face an
/// open end of the river.
struct BoundaryLoop {
  Polyline points;
  std::vector<bool> opening;
  double area = 0.0;
};

/// Marching squares over the cell-centre lattice; one loop per boundary component.
std::vector<BoundaryLoop> trace_free_boundaries(const RiverMap& map);

/// Matched bank pair. Arcs are measured along the respective polylines.
struct CrossSection {
  Vec2 left;
  Vec2 right;
  double left_arc = 0.0;
  double right_arc = 0.0;
  double center_arc = 0.0;

  double width() const { return distance(left, right); }
  Vec2 midpoint() const { return lerp(left, right, 0.5); }
  Vec2 at_fraction_from_left(double u) const { return lerp(left, right, u); }
};

/// Left and right banks ordered away from the start end, with the centreline made of
/// matched-pair midpoints (centerline vertex k is the midpoint of sections[k]).
struct BankContours {
  ArcPolyline left_bank;
  ArcPolyline right_bank;
  ArcPolyline centerline;
  std::vector<CrossSection> sections;
  double resolution = 1.0;

  double length() const { return centerline.length(); }
  /// Cross-section interpolated at a centreline arc.
  CrossSection section_at(double center_arc) const;
  /// Index of the last section whose centre arc is <= center_arc.
  std::size_t section_index(double center_arc) const;
  /// Unit tangent of the centreline (direction of increasing arc).
  Vec2 tangent_at(double center_arc) const;
};

enum class StartConvention { StartIsDownstreamEnd, StartIsUpstreamEnd };

struct FlowDirection {
  /// Unit vector pointing away from the start end along the centreline.
  Vec2 heading;
  StartConvention orientation = StartConvention::StartIsDownstreamEnd;

  /// True when travelling towards increasing centreline arc is upstream travel.
  bool upstream_is_increasing_arc() const { return orientation == StartConvention::StartIsDownstreamEnd; }
};

struct WidthSample {
  double arc = 0.0;
  double width = 0.0;
};

struct WidthProfile {
  std::vector<WidthSample> samples;
  double mean() const;
  double min() const;
  double max() const;
  /// Linear interpolation by arc.
  double at(double arc) const;
};

/// Traces the river outline, splits it at the two open ends and returns smoothed
/// bank polylines ordered from the end nearest `start`.
/// Throws ValidationError if the start is too far from the river or the outline
/// does not have two openings.
BankContours get_directional_contours(const RiverMap& map, Vec2 start);

/// Heading away from the end nearest `start`. Throws ValidationError if the start is
/// equally close to both ends (within one centreline sample) or outside the contours'
/// bounding box.
FlowDirection get_downriver_direction(const BankContours& contours, Vec2 start,
                                      StartConvention orientation = StartConvention::StartIsDownstreamEnd);

WidthProfile width_profile(const BankContours& contours);

/// FeatureCollection of LineStrings with `role` = left_bank | right_bank | centerline.
std::string contours_to_geojson(const BankContours& contours);

}  // namespace rivercover
