#include "rivercover/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "planner_internal.hpp"
#include "rivercover/errors.hpp"
#include "rivercover/grid_path.hpp"

namespace rivercover {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MCover:
      return "m-cover";
    case Algorithm::WidthMCover:
      return "width-m-cover";
    case Algorithm::LCover:
      return "l-cover";
    case Algorithm::TCover:
      return "t-cover";
    case Algorithm::ZCover:
      return "z-cover";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::MCover, Algorithm::WidthMCover, Algorithm::LCover, Algorithm::TCover,
                      Algorithm::ZCover})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

const char* to_string(TravelDirection d) { return d == TravelDirection::Upstream ? "upstream" : "downstream"; }

bool is_closed_tour(Algorithm a) { return a != Algorithm::ZCover; }

Polyline CoveragePlan::path() const {
  Polyline out;
  for (const auto& leg : legs)
    for (const Vec2 p : leg.path)
      if (out.empty() || distance(out.back(), p) > 1e-9) out.push_back(p);
  return out;
}

double CoveragePlan::length() const {
  double total = 0.0;
  for (const auto& leg : legs) total += polyline_length(leg.path);
  return total;
}

int round_to_even(double x) { return std::max(2, 2 * static_cast<int>(std::floor(x / 2.0 + 0.5))); }

namespace detail {

TourBuilder::TourBuilder(const RiverMap& map, CoveragePlan plan) : map_(map), plan_(std::move(plan)) {
  cursor_ = plan_.start;
}

void TourBuilder::connect_to(Vec2 p) {
  if (distance(cursor_, p) < 1e-9) return;
  PlanLeg leg;
  leg.kind = LegKind::Connector;
  leg.path = create_pass_between(map_, cursor_, p);
  // Snapping may have moved the ends onto Free cells; keep the chain exact.
  leg.path.front() = cursor_;
  leg.path.back() = p;
  leg.path = dedupe(leg.path);
  if (leg.path.size() < 2) leg.path = {cursor_, p};
  plan_.legs.push_back(std::move(leg));
  cursor_ = p;
}

void TourBuilder::add_leg(PlanLeg leg) {
  if (leg.path.empty()) return;
  connect_to(leg.path.front());
  cursor_ = leg.path.back();
  plan_.legs.push_back(std::move(leg));
}

void TourBuilder::add_lane(const Pass& pass, bool increasing_arc) {
  PlanLeg leg;
  leg.kind = LegKind::Lane;
  leg.path = pass.polyline;
  if (!increasing_arc) std::reverse(leg.path.begin(), leg.path.end());
  leg.lane_index = pass.lane_index;
  leg.lane_count = pass.lane_count;
  leg.direction = pass.direction;
  leg.segment_id = pass.segment_id;
  add_leg(std::move(leg));
}

CoveragePlan TourBuilder::finish(bool close) {
  if (close) connect_to(plan_.start);
  return std::move(plan_);
}

CoveragePlan empty_plan(const RiverMap& map, Algorithm algorithm, Vec2 start, double s) {
  CoveragePlan p;
  p.algorithm = algorithm;
  p.start = start;
  p.spacing = s;
  p.map_id = map.fingerprint();
  return p;
}

void require_spacing(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("spacing must be a positive number of metres");
}

void require_two_lanes_fit(const BankContours& contours, double s) {
  std::vector<double> bad;
  for (const auto& cs : contours.sections)
    if (cs.width() <= s) bad.push_back(cs.center_arc);
  if (bad.empty()) return;
  std::string msg = "spacing " + std::to_string(s) + " m does not fit two lanes at " + std::to_string(bad.size()) +
                    " sections; arcs (m):";
  char buf[32];
  for (std::size_t k = 0; k < bad.size() && k < 20; ++k) {
    std::snprintf(buf, sizeof buf, " %.1f", bad[k]);
    msg += buf;
  }
  if (bad.size() > 20) msg += " ...";
  throw InfeasibleError(msg);
}

double mean_width(const BankContours& contours, double start_arc, double end_arc) {
  double sum = 0.0;
  int n = 0;
  for (const auto& cs : contours.sections)
    if (cs.center_arc >= start_arc && cs.center_arc <= end_arc) {
      sum += cs.width();
      ++n;
    }
  if (n == 0) return contours.section_at(0.5 * (start_arc + end_arc)).width();
  return sum / n;
}

std::vector<SameWidthCluster> sweep_clusters(const BankContours& contours, double s,
                                             const std::function<int(double)>& lane_count) {
  const double length = contours.length();
  const double step = std::max(s, contours.resolution);
  std::vector<double> arcs;
  for (double t = 0.0; t < length; t += step) arcs.push_back(t);
  arcs.push_back(length);
  std::vector<double> widths;
  std::vector<int> counts;
  for (double t : arcs) {
    widths.push_back(contours.section_at(t).width());
    counts.push_back(lane_count(widths.back()));
  }

  struct Open {
    std::size_t first;
    int count;
    double sum;
    int n;
  };
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  Open cur{0, counts[0], widths[0], 1};
  for (std::size_t k = 1; k < arcs.size(); ++k) {
    const auto differs = [&](std::size_t m) {
      return counts[m] != cur.count || std::abs(widths[m] - cur.sum / cur.n) >= s;
    };
    if (k + 1 < arcs.size() && differs(k) && differs(k + 1) && counts[k] == counts[k + 1]) {
      ranges.push_back({cur.first, k - 1});
      cur = {k, counts[k], widths[k], 1};
      continue;
    }
    cur.sum += widths[k];
    ++cur.n;
  }
  ranges.push_back({cur.first, arcs.size() - 1});

  std::vector<SameWidthCluster> out;
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    SameWidthCluster c;
    c.start_arc = r == 0 ? 0.0 : 0.5 * (arcs[ranges[r - 1].second] + arcs[ranges[r].first]);
    c.end_arc = r + 1 == ranges.size() ? length : 0.5 * (arcs[ranges[r].second] + arcs[ranges[r + 1].first]);
    double sum = 0.0;
    for (std::size_t k = ranges[r].first; k <= ranges[r].second; ++k) sum += widths[k];
    c.nominal_width = sum / static_cast<double>(ranges[r].second - ranges[r].first + 1);
    c.pass_count = lane_count(c.nominal_width);
    out.push_back(c);
  }
  // Neighbours that ended up with the same count and similar width are one cluster.
  std::vector<SameWidthCluster> merged;
  for (const auto& c : out) {
    if (!merged.empty() && merged.back().pass_count == c.pass_count &&
        std::abs(merged.back().nominal_width - c.nominal_width) < s) {
      auto& m = merged.back();
      const double la = m.end_arc - m.start_arc, lb = c.end_arc - c.start_arc;
      m.nominal_width = (m.nominal_width * la + c.nominal_width * lb) / (la + lb);
      m.end_arc = c.end_arc;
      continue;
    }
    merged.push_back(c);
  }
  return merged;
}

Vec2 inset_point(const RiverMap& map, const CrossSection& cs, bool from_left, double inset) {
  const double w = std::max(cs.width(), 1e-9);
  double u = std::min(inset / w, 0.5);
  const double du = 0.25 * map.resolution() / w;
  Vec2 p = cs.at_fraction_from_left(from_left ? u : 1.0 - u);
  while (!map.free_at(p) && u < 0.5) {
    u = std::min(0.5, u + du);
    p = cs.at_fraction_from_left(from_left ? u : 1.0 - u);
  }
  return p;
}

Polyline bank_track(const RiverMap& map, const BankContours& contours, double from_arc, double to_arc, bool left,
                    double inset) {
  Polyline out;
  const double lo = std::min(from_arc, to_arc), hi = std::max(from_arc, to_arc);
  out.push_back(inset_point(map, contours.section_at(lo), left, inset));
  for (const auto& cs : contours.sections)
    if (cs.center_arc > lo && cs.center_arc < hi) out.push_back(inset_point(map, cs, left, inset));
  out.push_back(inset_point(map, contours.section_at(hi), left, inset));
  out = repair_path(map, dedupe(out));
  if (from_arc > to_arc) std::reverse(out.begin(), out.end());
  return out;
}

Polyline repair_path(const RiverMap& map, const Polyline& path) {
  if (path.size() < 2) return path;
  Polyline out{path.front()};
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (line_of_sight(map, path[k - 1], path[k])) {
      out.push_back(path[k]);
      continue;
    }
    const Polyline detour = create_pass_between(map, path[k - 1], path[k]);
    for (std::size_t d = 1; d + 1 < detour.size(); ++d) out.push_back(detour[d]);
    out.push_back(path[k]);
  }
  return out;
}

int lane_count_for_width(double width, double s, double resolution) {
  return round_to_even((width + resolution) / s);
}

TravelDirection direction_of_travel(const FlowDirection& flow, bool increasing_arc) {
  return increasing_arc == flow.upstream_is_increasing_arc() ? TravelDirection::Upstream
                                                              : TravelDirection::Downstream;
}

}  // namespace detail

using namespace detail;

RiverModel build_river_model(const RiverMap& map, Vec2 start, const PlannerOptions& options) {
  RiverModel m;
  m.contours = get_directional_contours(map, start);
  m.flow = get_downriver_direction(m.contours, start, options.orientation);
  m.step = options.delta_w ? TangentStep::checked(*options.delta_w, map.resolution())
                           : default_tangent_step(m.contours);
  m.segments = get_meander_segments(map, m.contours, m.flow, m.step);
  return m;
}

std::vector<Pass> lanes_for_block(const BankContours& contours, double start_arc, double end_arc, Bank inner_bank,
                                  int lane_count, int segment_id) {
  std::vector<CrossSection> secs{contours.section_at(start_arc)};
  for (const auto& cs : contours.sections)
    if (cs.center_arc > start_arc && cs.center_arc < end_arc) secs.push_back(cs);
  secs.push_back(contours.section_at(end_arc));

  std::vector<Pass> out;
  for (int j = 0; j < lane_count; ++j) {
    Pass p;
    p.lane_index = j;
    p.lane_count = lane_count;
    p.cross_fraction = (j + 0.5) / lane_count;
    p.segment_id = segment_id;
    p.start_arc = start_arc;
    p.end_arc = end_arc;
    const double from_left = inner_bank == Bank::Left ? p.cross_fraction : 1.0 - p.cross_fraction;
    for (const auto& cs : secs) p.polyline.push_back(cs.at_fraction_from_left(from_left));
    p.polyline = dedupe(p.polyline);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Pass> split_into_even_passes(const MeanderSegment& segment, const BankContours& contours, double s) {
  require_spacing(s);
  const double w = mean_width(contours, segment.start_arc, segment.end_arc);
  if (s >= w) throw InfeasibleError("spacing " + std::to_string(s) + " m is not below the segment width " +
                                    std::to_string(w) + " m; two lanes do not fit");
  return lanes_for_block(contours, segment.start_arc, segment.end_arc, segment.inner_bank,
                         lane_count_for_width(w, s, contours.resolution), segment.id);
}

std::vector<Pass> assign_pass_directions(std::vector<Pass> passes) {
  const std::size_t k = passes.size();
  if (k % 2 != 0) throw ValidationError("direction assignment needs an even number of passes");
  for (std::size_t i = 0; i < k / 2; ++i) {
    Pass& a = passes[i];
    Pass& b = passes[k / 2 + i];
    const bool a_outside = a.cross_fraction > 0.5;
    a.direction = a_outside ? TravelDirection::Downstream : TravelDirection::Upstream;
    b.direction = a_outside ? TravelDirection::Upstream : TravelDirection::Downstream;
  }
  return passes;
}

Polyline create_pass_between(const RiverMap& map, Vec2 from, Vec2 to) {
  auto path = free_space_path(map, from, to);
  if (!path) throw std::logic_error("no free-space path between plan pieces");
  return *path;
}

std::vector<SameWidthCluster> get_same_width_clusters(const BankContours& contours, const FlowDirection& flow,
                                                      double s) {
  (void)flow;  // arcs already increase away from the start, which is the sweep order
  require_spacing(s);
  const double res = contours.resolution;
  return sweep_clusters(contours, s, [=](double w) { return lane_count_for_width(w, s, res); });
}

namespace {

// Rounds of an out-and-back tour: out on pair r's away lane through every block, back on
// its partner through the blocks in reverse. Blocks with fewer lanes repeat their last pair.
CoveragePlan tour_from_blocks(const RiverMap& map, const RiverModel& model, std::vector<std::vector<Pass>> blocks,
                              CoveragePlan plan) {
  const bool away_is_upstream = model.flow.upstream_is_increasing_arc();
  const TravelDirection away = away_is_upstream ? TravelDirection::Upstream : TravelDirection::Downstream;
  std::size_t rounds = 0;
  for (const auto& b : blocks) rounds = std::max(rounds, b.size() / 2);
  const auto lane_of = [&](const std::vector<Pass>& lanes, std::size_t r, bool outbound) -> const Pass& {
    const std::size_t half = lanes.size() / 2;
    const std::size_t i = std::min(r, half - 1);
    const Pass& a = lanes[i];
    const Pass& b = lanes[half + i];
    const bool a_matches = (a.direction == away) == outbound;
    return a_matches ? a : b;
  };
  TourBuilder tour(map, std::move(plan));
  for (std::size_t r = 0; r < rounds; ++r) {
    for (const auto& lanes : blocks) tour.add_lane(lane_of(lanes, r, true), true);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) tour.add_lane(lane_of(*it, r, false), false);
  }
  return tour.finish(true);
}

}  // namespace

CoveragePlan m_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options) {
  require_spacing(s);
  const RiverModel model = build_river_model(map, start, options);
  require_two_lanes_fit(model.contours, s);
  std::vector<std::vector<Pass>> blocks;
  for (const auto& seg : model.segments)
    blocks.push_back(assign_pass_directions(split_into_even_passes(seg, model.contours, s)));
  return tour_from_blocks(map, model, std::move(blocks), empty_plan(map, Algorithm::MCover, start, s));
}

CoveragePlan width_based_m_cover(const RiverMap& map, Vec2 start, double s, const PlannerOptions& options) {
  require_spacing(s);
  const RiverModel model = build_river_model(map, start, options);
  require_two_lanes_fit(model.contours, s);
  const auto clusters = get_same_width_clusters(model.contours, model.flow, s);

  std::vector<double> cuts{0.0, model.contours.length()};
  for (const auto& seg : model.segments) cuts.push_back(seg.end_arc);
  for (const auto& c : clusters) cuts.push_back(c.end_arc);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> kept{cuts.front()};
  const double min_block = map.resolution();
  for (double c : cuts)
    if (c - kept.back() >= min_block) kept.push_back(c);
  kept.back() = model.contours.length();

  std::vector<std::vector<Pass>> blocks;
  for (std::size_t b = 0; b + 1 < kept.size(); ++b) {
    const double a0 = kept[b], a1 = kept[b + 1], mid = 0.5 * (a0 + a1);
    const MeanderSegment& seg = model.segments[segment_at(model.segments, mid)];
    int k = 2;
    for (const auto& c : clusters)
      if (mid >= c.start_arc && mid <= c.end_arc) k = c.pass_count;
    blocks.push_back(assign_pass_directions(lanes_for_block(model.contours, a0, a1, seg.inner_bank, k, seg.id)));
  }
  return tour_from_blocks(map, model, std::move(blocks), empty_plan(map, Algorithm::WidthMCover, start, s));
}

CoveragePlan plan_coverage(Algorithm algorithm, const RiverMap& map, Vec2 start, double s,
                           const PlannerOptions& options) {
  switch (algorithm) {
    case Algorithm::MCover:
      return m_cover(map, start, s, options);
    case Algorithm::WidthMCover:
      return width_based_m_cover(map, start, s, options);
    case Algorithm::LCover:
      return l_cover(map, start, s, options);
    case Algorithm::TCover:
      return t_cover(map, start, s, options);
    case Algorithm::ZCover:
      return z_cover(map, start, s, options);
  }
  throw ValidationError("unknown algorithm");
}

double coverage_fraction(const RiverMap& map, const Polyline& path, double radius) {
  const int w = map.width(), h = map.height();
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(w) * h, 0);
  const double res = map.resolution();
  const Vec2 o = map.origin();
  const auto mark = [&](Vec2 a, Vec2 b) {
    const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - radius - o.x) / res)));
    const int i1 = std::min(w - 1, static_cast<int>(std::floor((std::max(a.x, b.x) + radius - o.x) / res)));
    const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - radius - o.y) / res)));
    const int j1 = std::min(h - 1, static_cast<int>(std::floor((std::max(a.y, b.y) + radius - o.y) / res)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        auto& cell = hit[static_cast<std::size_t>(j) * w + i];
        if (!cell && point_segment_distance(map.cell_center(i, j), a, b) <= radius) cell = 1;
      }
  };
  if (path.size() == 1) mark(path[0], path[0]);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) mark(path[k], path[k + 1]);
  std::size_t covered = 0;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      if (map.is_free(i, j) && hit[static_cast<std::size_t>(j) * w + i]) ++covered;
  return map.free_count() ? static_cast<double>(covered) / static_cast<double>(map.free_count()) : 0.0;
}

double completeness(const RiverMap& map, const CoveragePlan& plan) {
  return coverage_fraction(map, plan.path(), plan.spacing / 2.0 + map.resolution());
}

std::string plan_summary(const RiverMap& map, const CoveragePlan& plan) {
  std::map<int, int> lanes;
  for (const auto& leg : plan.legs)
    if (leg.kind == LegKind::Lane) lanes[leg.segment_id] = leg.lane_count;
  const double c = completeness(map, plan);
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "algorithm: %s\nlength_m: %.1f\nspacing_m: %.3f\n", to_string(plan.algorithm),
                plan.length(), plan.spacing);
  out += buf;
  out += "lanes:";
  for (const auto& [seg, k] : lanes) {
    std::snprintf(buf, sizeof buf, " seg%d=%d", seg, k);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\ncompleteness_pct: %.2f\ncomplete: %s\n", 100.0 * c, c >= 0.99 ? "true" : "false");
  out += buf;
  return out;
}

}  // namespace rivercover
