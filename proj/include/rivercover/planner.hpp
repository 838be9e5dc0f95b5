#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rivercover/contours.hpp"
#include "rivercover/meander.hpp"
#include "rivercover/river_map.hpp"

namespace rivercover {

enum class Algorithm { MCover, WidthMCover, LCover, TCover, ZCover };
enum class TravelDirection { Upstream, Downstream };
enum class LegKind { Lane, Connector };

/// CLI spelling: m-cover, width-m-cover, l-cover, t-cover, z-cover.
const char* to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
const char* to_string(TravelDirection d);
bool is_closed_tour(Algorithm a);

/// One longitudinal lane of a block.
struct Pass {
  Polyline polyline;  // ordered by increasing centreline arc
  int lane_index = 0;  // 0 hugs the inner bank
  int lane_count = 0;
  double cross_fraction = 0.0;  // from the inner bank
  TravelDirection direction = TravelDirection::Upstream;
  int segment_id = -1;
  double start_arc = 0.0;
  double end_arc = 0.0;
};

struct PlanLeg {
  LegKind kind = LegKind::Connector;
  Polyline path;
  int lane_index = -1;
  int lane_count = 0;
  std::optional<TravelDirection> direction;
  int segment_id = -1;
};

struct CoveragePlan {
  std::vector<PlanLeg> legs;
  double spacing = 0.0;
  Algorithm algorithm = Algorithm::MCover;
  Vec2 start;
  std::uint64_t map_id = 0;

  /// Concatenated vertices, shared leg endpoints emitted once.
  Polyline path() const;
  double length() const;
  bool closed_tour() const { return is_closed_tour(algorithm); }
};

struct SameWidthCluster {
  double start_arc = 0.0;
  double end_arc = 0.0;
  double nominal_width = 0.0;
  int pass_count = 2;
};

/// 2 * floor(x / 2 + 0.5), at least 2.
int round_to_even(double x);

struct PlannerOptions {
  StartConvention orientation = StartConvention::StartIsDownstreamEnd;
  std::optional<double> delta_w;
};

/// Everything the planners derive from the map before laying lanes.
struct RiverModel {
  BankContours contours;
  FlowDirection flow;
  TangentStep step;
  std::vector<MeanderSegment> segments;
};

RiverModel build_river_model(const RiverMap& map, Vec2 start, const PlannerOptions& options = {});

/// Lanes over a centreline arc interval at cross-fractions (j + 0.5) / k from the inner bank.
std::vector<Pass> lanes_for_block(const BankContours& contours, double start_arc, double end_arc, Bank inner_bank,
                                  int lane_count, int segment_id);

/// k = round_to_even(mean segment width / s). Throws InfeasibleError when s >= width.
std::vector<Pass> split_into_even_passes(const MeanderSegment& segment, const BankContours& contours, double s);

/// Pairs lane i with lane k/2 + i: the one on the outside of the bend goes Downstream.
/// Throws ValidationError on an odd count.
std::vector<Pass> assign_pass_directions(std::vector<Pass> passes);

/// Free-space connector between two points (grid shortest path, string pulled).
/// Throws std::logic_error if no path exists.
Polyline create_pass_between(const RiverMap& map, Vec2 from, Vec2 to);

std::vector<SameWidthCluster> get_same_width_clusters(const BankContours& contours, const FlowDirection& flow,
                                                      double s);

CoveragePlan m_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options = {});
CoveragePlan width_based_m_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options = {});
CoveragePlan l_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options = {});
CoveragePlan t_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options = {});
CoveragePlan z_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options = {});

CoveragePlan plan_coverage(Algorithm algorithm, const RiverMap& map, Vec2 start, double s,
                           const PlannerOptions& options = {});

/// Fraction of Free cells whose centre is within `radius` of the plan path.
double coverage_fraction(const RiverMap& map, const Polyline& path, double radius);
/// Same with the standard radius s/2 + resolution.
double completeness(const RiverMap& map, const CoveragePlan& plan);

/// Multi-line human summary: length, lanes per segment, completeness.
std::string plan_summary(const RiverMap& map, const CoveragePlan& plan);

}  // namespace rivercover
