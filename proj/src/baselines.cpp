#include <algorithm>
#include <cmath>

#include "planner_internal.hpp"
#include "rivercover/planner.hpp"

namespace rivercover {

using namespace detail;

namespace {

bool left_bank_nearest_start(const BankContours& c, Vec2 start) {
  return distance(start, c.left_bank.front()) <= distance(start, c.right_bank.front());
}

}  // namespace

CoveragePlan l_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options) {
  require_spacing(s);
  const RiverModel model = build_river_model(map, start, options);
  const auto clusters =
      sweep_clusters(model.contours, s, [&](double w) {
        return std::max(1, static_cast<int>(std::floor((w + map.resolution()) / s + 0.5)));
      });
  const Bank near = left_bank_nearest_start(model.contours, start) ? Bank::Left : Bank::Right;

  std::vector<std::vector<Pass>> blocks;
  std::size_t rounds = 0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    blocks.push_back(lanes_for_block(model.contours, clusters[c].start_arc, clusters[c].end_arc, near,
                                     clusters[c].pass_count, static_cast<int>(c)));
    rounds = std::max(rounds, (blocks.back().size() + 1) / 2);
  }

  TourBuilder tour(map, empty_plan(map, Algorithm::LCover, start, s));
  for (std::size_t r = 0; r < rounds; ++r) {
    for (auto& lanes : blocks) {
      Pass p = lanes[std::min(2 * r, lanes.size() - 1)];
      p.direction = direction_of_travel(model.flow, true);
      tour.add_lane(p, true);
    }
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      Pass p = (*it)[std::min(2 * r + 1, it->size() - 1)];
      p.direction = direction_of_travel(model.flow, false);
      tour.add_lane(p, false);
    }
  }
  return tour.finish(true);
}

CoveragePlan t_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options) {
  require_spacing(s);
  const RiverModel model = build_river_model(map, start, options);
  const BankContours& c = model.contours;
  const double res = map.resolution();
  const double length = c.length();

  std::vector<double> arcs;
  const int n = static_cast<int>(std::floor((length + res) / s)) + 1;
  for (int m = 0; m < n; ++m) arcs.push_back(std::min(m * s, length));
  // Close the far end when the regular grid stops more than half a spacing short.
  if (length - arcs.back() > 0.5 * s) arcs.push_back(length);

  bool on_left = left_bank_nearest_start(c, start);
  TourBuilder tour(map, empty_plan(map, Algorithm::TCover, start, s));
  for (std::size_t m = 0; m < arcs.size(); ++m) {
    if (m > 0) {
      PlanLeg along;
      along.kind = LegKind::Connector;
      along.path = bank_track(map, c, arcs[m - 1], arcs[m], on_left, res);
      tour.add_leg(std::move(along));
    }
    const CrossSection cs = c.section_at(arcs[m]);
    const Vec2 a = inset_point(map, cs, on_left, res);
    const Vec2 b = inset_point(map, cs, !on_left, res);
    PlanLeg transect;
    transect.kind = LegKind::Lane;
    transect.path = create_pass_between(map, a, b);
    transect.path.front() = a;
    transect.path.back() = b;
    transect.lane_index = static_cast<int>(m);
    transect.lane_count = static_cast<int>(arcs.size());
    tour.add_leg(std::move(transect));
    on_left = !on_left;
  }
  // Travel back to the start along the bank where the last transect ended.
  PlanLeg back;
  back.kind = LegKind::Connector;
  back.path = bank_track(map, c, arcs.back(), 0.0, on_left, res);
  back.direction = direction_of_travel(model.flow, false);
  tour.add_leg(std::move(back));
  return tour.finish(true);
}

CoveragePlan z_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options) {
  require_spacing(s);
  const RiverModel model = build_river_model(map, start, options);
  const BankContours& c = model.contours;
  const double advance = 2.0 * s;
  const double inset = 0.5 * map.resolution();
  const int n = std::max(1, static_cast<int>(std::lround(c.length() / advance)));

  bool on_left = left_bank_nearest_start(c, start);
  TourBuilder tour(map, empty_plan(map, Algorithm::ZCover, start, s));
  Vec2 prev = inset_point(map, c.section_at(0.0), on_left, inset);
  tour.connect_to(prev);
  for (int m = 1; m <= n; ++m) {
    on_left = !on_left;
    const Vec2 next = inset_point(map, c.section_at(std::min(m * advance, c.length())), on_left, inset);
    PlanLeg leg;
    leg.kind = LegKind::Lane;
    leg.path = create_pass_between(map, prev, next);
    leg.path.front() = prev;
    leg.path.back() = next;
    leg.lane_index = m - 1;
    leg.lane_count = n;
    leg.direction = direction_of_travel(model.flow, true);
    tour.add_leg(std::move(leg));
    prev = next;
  }
  return tour.finish(false);
}

}  // namespace rivercover
