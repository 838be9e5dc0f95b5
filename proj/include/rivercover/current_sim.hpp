#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rivercover/planner.hpp"

namespace rivercover {

enum class SpeedProfile { Linear, PowerLaw };

struct FieldParams {
  double v_min = 0.2;
  double v_max = 1.0;
  SpeedProfile profile = SpeedProfile::Linear;
  double exponent = 2.0;  // PowerLaw only
  /// Half-width of the blend window around segment boundaries, in local river widths.
  double blend_half_widths = 0.5;
};

/// Per-cell current, aligned with the downstream centreline tangent.
class CurrentField {
 public:
  CurrentField() = default;
  CurrentField(const RiverMap& map, std::vector<Vec2> velocity, double v_min, double v_max);

  /// Velocity of the cell containing p; points on land take the nearest Free neighbour
  /// within one cell, else zero.
  Vec2 at(Vec2 p) const;
  Vec2 cell_velocity(int i, int j) const { return velocity_[static_cast<std::size_t>(j) * width_ + i]; }
  bool cell_free(int i, int j) const;

  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  std::uint64_t map_id() const { return map_id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  /// Cross-section each cell was matched to, -1 when unknown, and the cell's fraction
  /// across it from the left bank. Empty for fields not built by synth_current_field.
  int cell_section(int i, int j) const;
  double cell_fraction_from_left(int i, int j) const;
  void set_sections(std::vector<int> section, std::vector<double> fraction_from_left);

  /// CSV `cell_x,cell_y,vx,vy`, Free cells only, cell centres in metres.
  std::string to_csv() const;
  CurrentField scaled(double factor) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Vec2 origin_{};
  std::vector<Vec2> velocity_;
  std::vector<std::uint8_t> free_;
  std::vector<int> section_;
  std::vector<double> fraction_;
  double v_min_ = 0.0;
  double v_max_ = 0.0;
  std::uint64_t map_id_ = 0;
};

/// Cross-fraction profile value in [0, 1].
double profile_value(const FieldParams& params, double u);

/// Magnitude v_min + (v_max - v_min) * profile(u) inside meander segments, with u the
/// cross-fraction from the inner bank; (v_min + v_max) / 2 on straight segments. Near a
/// boundary each side fades linearly into that uniform mid value, which keeps the
/// inner-to-outer ordering inside every segment. Throws ValidationError when
/// v_min > v_max or v_min < 0.
CurrentField synth_current_field(const RiverMap& map, const RiverModel& model, const FieldParams& params);

struct BoatModel {
  double speed_through_water = 2.0;  // m/s
  double turn_penalty = 0.0;         // s / rad
};

struct LegTiming {
  std::size_t leg = 0;
  LegKind kind = LegKind::Connector;
  double length = 0.0;
  double time = 0.0;
};

struct TraversalReport {
  double total_time = 0.0;
  double total_length = 0.0;
  double turn_time = 0.0;
  std::vector<LegTiming> legs;
};

/// Sum of length / (boat + v . t) over sub-segments no longer than half a cell, plus the
/// turn penalty times the total heading change. Throws ValidationError if the ground
/// speed is not positive somewhere or the boat is not faster than v_max.
TraversalReport traverse_time(const CoveragePlan& plan, const CurrentField& field, const BoatModel& boat);
/// Time along a bare polyline, no turn penalty.
double polyline_time(const Polyline& path, const CurrentField& field, double boat_speed);

struct ComparisonRow {
  Algorithm algorithm = Algorithm::MCover;
  double length_m = 0.0;
  double time_s = 0.0;
  double ratio_vs_best = 1.0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  /// Pairwise time ratios rows[a].time / rows[b].time.
  std::vector<std::vector<double>> ratios;

  /// Header `algorithm,length_m,time_s,ratio_vs_best`.
  std::string csv() const;
  /// "fastest: <algo>, margin <x>% over <runner-up>".
  std::string verdict() const;
  /// 1 - time(a) / time(b).
  double savings(Algorithm a, Algorithm b) const;
};

/// Throws ValidationError when any plan was built on a different map than the field.
Comparison compare_plans(const std::vector<CoveragePlan>& plans, const CurrentField& field, const BoatModel& boat);

/// Outer lane of a two-lane split of every segment, concatenated in arc order.
Polyline outer_lane_track(const RiverModel& model);

/// Upstream:downstream time ratio on the outer-lane track.
double outer_lane_ratio(const RiverMap& map, const RiverModel& model, const FieldParams& params, double boat_speed);

/// Bisects v_max (v_min and profile fixed) until the outer-lane ratio equals `target`.
/// The returned parameters keep v_max below the boat speed.
FieldParams calibrate_field(const RiverMap& map, const RiverModel& model, FieldParams params, double boat_speed,
                            double target = 1.47);

}  // namespace rivercover
