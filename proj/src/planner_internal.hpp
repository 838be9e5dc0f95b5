#pragma once

#include <functional>

#include "rivercover/planner.hpp"

namespace rivercover::detail {

/// Appends legs, inserting free-space connectors whenever the next leg does not start
/// where the previous one ended.
class TourBuilder {
 public:
  TourBuilder(const RiverMap& map, CoveragePlan plan);

  void connect_to(Vec2 p);
  void add_leg(PlanLeg leg);
  void add_lane(const Pass& pass, bool increasing_arc);
  Vec2 cursor() const { return cursor_; }
  CoveragePlan finish(bool close);

 private:
  const RiverMap& map_;
  CoveragePlan plan_;
  Vec2 cursor_;
};

CoveragePlan empty_plan(const RiverMap& map, Algorithm algorithm, Vec2 start, double s);

void require_spacing(double s);
/// InfeasibleError listing the arcs where a section is not wider than s.
void require_two_lanes_fit(const BankContours& contours, double s);

/// Mean section width over a centreline interval.
double mean_width(const BankContours& contours, double start_arc, double end_arc);

/// Greedy arc sweep at spacing s; a new cluster opens when the lane count (or the
/// width, by s or more) changes for two consecutive samples. `lane_count` maps a width.
std::vector<SameWidthCluster> sweep_clusters(const BankContours& contours, double s,
                                             const std::function<int(double)>& lane_count);

/// Even lane count for a measured width. The raster can shave up to a cell off the
/// width, so one resolution is added back before rounding.
int lane_count_for_width(double width, double s, double resolution);

/// Replaces segments that clip land with free-space detours.
Polyline repair_path(const RiverMap& map, const Polyline& path);

/// Point at `inset` metres from one bank along the section, moved further in until
/// its cell is Free.
Vec2 inset_point(const RiverMap& map, const CrossSection& cs, bool from_left, double inset);

/// Inset track along one bank between two centreline arcs (either order).
Polyline bank_track(const RiverMap& map, const BankContours& contours, double from_arc, double to_arc,
                    bool left, double inset);

TravelDirection direction_of_travel(const FlowDirection& flow, bool increasing_arc);

}  // namespace rivercover::detail
