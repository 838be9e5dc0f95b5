#pragma once

#include <string>
#include <vector>

#include "rivercover/contours.hpp"
#include "rivercover/river_map.hpp"

namespace rivercover {

enum class BendLabel { Inner, Outer, Straight };
enum class Bank { Left, Right };

const char* to_string(BendLabel label);
const char* to_string(Bank bank);
inline Bank opposite(Bank b) { return b == Bank::Left ? Bank::Right : Bank::Left; }

/// Arc-length baseline between the two tangents of the bend test.
struct TangentStep {
  double delta_w = 0.0;

  /// Throws ValidationError unless delta_w >= 2 * resolution.
  static TangentStep checked(double delta_w, double resolution);
};

/// max(4 * resolution, mean width / 4).
TangentStep default_tangent_step(const BankContours& contours);

struct TangentLine {
  Vec2 anchor;
  Vec2 direction;  // unit
};

/// Symmetric secant: direction of the chord between arc - dw/2 and arc + dw/2,
/// anchored at the contour point at `arc`. Throws ValidationError when the chord
/// leaves the contour.
TangentLine tangent_at(const ArcPolyline& contour, double arc, TangentStep step);

/// Total-least-squares line through the contour over the same window, anchored at
/// the foot of the point at `arc`. The bend test uses this one: a two-point secant
/// picks up the corners left by simplification.
TangentLine fitted_tangent_at(const ArcPolyline& contour, double arc, TangentStep step);

/// Outcome of intersecting the tangents at arc - dw/2 and arc + dw/2.
struct BendTest {
  BendLabel label = BendLabel::Straight;
  bool parallel = false;
  Vec2 intersection;
  Vec2 probe;          // where the map was sampled
  double turn_rad = 0.0;
};

/// Tangent-intersection bend test on fitted tangents. The intersection is looked up in the map (3x3
/// majority); because consecutive tangents of a smooth bank cross within a fraction
/// of a cell of it, the lookup point is pushed off the chord, on the intersection's
/// side, to at least two cells. Parallel tangents (< 0.5 deg) or an intersection more
/// than 10 local widths away give Straight.
BendTest bend_test(const RiverMap& map, const ArcPolyline& contour, double arc, TangentStep step,
                   double local_width);
BendLabel classify_bend(const RiverMap& map, const ArcPolyline& contour, double arc, TangentStep step,
                        double local_width);

/// One classified bank sample.
struct BankLabel {
  double center_arc = 0.0;
  Bank bank = Bank::Left;
  double bank_arc = 0.0;
  Vec2 point;
  BendLabel label = BendLabel::Straight;
};

/// Classifies both banks at every delta_w step along the centreline.
std::vector<BankLabel> classify_banks(const RiverMap& map, const BankContours& contours, TangentStep step);

struct MeanderSegment {
  int id = 0;
  double start_arc = 0.0;
  double end_arc = 0.0;
  Bank inner_bank = Bank::Left;
  /// No bend polarity; inner_bank is inherited from the nearest upstream meander.
  bool straight = false;
  CrossSection entry_section;
  CrossSection exit_section;
  Vec2 apex;

  double length() const { return end_arc - start_arc; }
};

/// Partitions [0, L] of the centreline into runs of consistent bend polarity,
/// ordered by increasing arc (away from the start end).
std::vector<MeanderSegment> get_meander_segments(const RiverMap& map, const BankContours& contours,
                                                 const FlowDirection& flow, TangentStep step);

/// Same, from precomputed labels.
std::vector<MeanderSegment> segments_from_labels(const BankContours& contours, const std::vector<BankLabel>& labels,
                                                 const FlowDirection& flow, TangentStep step);

/// Segment index containing a centreline arc.
std::size_t segment_at(const std::vector<MeanderSegment>& segments, double arc);

std::string segments_to_geojson(const std::vector<MeanderSegment>& segments);
/// CSV with header `arc,bank,label`.
std::string bend_labels_csv(const std::vector<BankLabel>& labels);

}  // namespace rivercover
