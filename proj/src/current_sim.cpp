#include "rivercover/current_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include "rivercover/errors.hpp"

namespace rivercover {

CurrentField::CurrentField(const RiverMap& map, std::vector<Vec2> velocity, double v_min, double v_max)
    : width_(map.width()),
      height_(map.height()),
      resolution_(map.resolution()),
      origin_(map.origin()),
      velocity_(std::move(velocity)),
      v_min_(v_min),
      v_max_(v_max),
      map_id_(map.fingerprint()) {
  free_.resize(velocity_.size());
  for (int j = 0; j < height_; ++j)
    for (int i = 0; i < width_; ++i) free_[static_cast<std::size_t>(j) * width_ + i] = map.is_free(i, j);
}

bool CurrentField::cell_free(int i, int j) const {
  return i >= 0 && j >= 0 && i < width_ && j < height_ && free_[static_cast<std::size_t>(j) * width_ + i];
}

Vec2 CurrentField::at(Vec2 p) const {
  const int i = static_cast<int>(std::floor((p.x - origin_.x) / resolution_));
  const int j = static_cast<int>(std::floor((p.y - origin_.y) / resolution_));
  if (cell_free(i, j)) return cell_velocity(i, j);
  double best = std::numeric_limits<double>::infinity();
  Vec2 v{};
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      if (!cell_free(i + di, j + dj)) continue;
      const Vec2 c = origin_ + Vec2{(i + di + 0.5) * resolution_, (j + dj + 0.5) * resolution_};
      if (distance(c, p) < best) {
        best = distance(c, p);
        v = cell_velocity(i + di, j + dj);
      }
    }
  return v;
}

int CurrentField::cell_section(int i, int j) const {
  const std::size_t k = static_cast<std::size_t>(j) * width_ + i;
  return k < section_.size() ? section_[k] : -1;
}

double CurrentField::cell_fraction_from_left(int i, int j) const {
  const std::size_t k = static_cast<std::size_t>(j) * width_ + i;
  return k < fraction_.size() ? fraction_[k] : 0.0;
}

void CurrentField::set_sections(std::vector<int> section, std::vector<double> fraction_from_left) {
  if (section.size() != velocity_.size() || fraction_from_left.size() != velocity_.size())
    throw ValidationError("section metadata must cover every cell");
  section_ = std::move(section);
  fraction_ = std::move(fraction_from_left);
}

std::string CurrentField::to_csv() const {
  std::string out = "cell_x,cell_y,vx,vy\n";
  char buf[128];
  for (int j = 0; j < height_; ++j)
    for (int i = 0; i < width_; ++i) {
      if (!cell_free(i, j)) continue;
      const Vec2 v = cell_velocity(i, j);
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.6f,%.6f\n", origin_.x + (i + 0.5) * resolution_,
                    origin_.y + (j + 0.5) * resolution_, v.x, v.y);
      out += buf;
    }
  return out;
}

CurrentField CurrentField::scaled(double factor) const {
  CurrentField f = *this;
  for (auto& v : f.velocity_) v = v * factor;
  f.v_min_ *= factor;
  f.v_max_ *= factor;
  return f;
}

double profile_value(const FieldParams& params, double u) {
  u = std::clamp(u, 0.0, 1.0);
  return params.profile == SpeedProfile::PowerLaw ? std::pow(u, params.exponent) : u;
}

namespace {

// Buckets of centreline segments for nearest-point queries.
class CenterlineIndex {
 public:
  CenterlineIndex(const ArcPolyline& line, double bucket) : line_(line), bucket_(bucket) {
    const auto& pts = line.points();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const int x0 = key(std::min(pts[k].x, pts[k + 1].x)), x1 = key(std::max(pts[k].x, pts[k + 1].x));
      const int y0 = key(std::min(pts[k].y, pts[k + 1].y)), y1 = key(std::max(pts[k].y, pts[k + 1].y));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) buckets_[pack(x, y)].push_back(k);
    }
  }

  /// Arc of the nearest centreline point.
  double nearest_arc(Vec2 p) const {
    const auto& pts = line_.points();
    const auto& arcs = line_.arcs();
    const int bx = key(p.x), by = key(p.y);
    for (int r = 1; r < 64; ++r) {
      double best = std::numeric_limits<double>::infinity(), arc = 0.0;
      for (int y = by - r; y <= by + r; ++y)
        for (int x = bx - r; x <= bx + r; ++x) {
          const auto it = buckets_.find(pack(x, y));
          if (it == buckets_.end()) continue;
          for (std::size_t k : it->second) {
            const SegmentFoot f = closest_on_segment(p, pts[k], pts[k + 1]);
            if (f.dist < best || (f.dist == best && arcs[k] + f.t * (arcs[k + 1] - arcs[k]) < arc)) {
              best = f.dist;
              arc = arcs[k] + f.t * (arcs[k + 1] - arcs[k]);
            }
          }
        }
      // Anything outside the searched square is at least r buckets away.
      if (best <= r * bucket_) return arc;
    }
    return line_.project(p).arc;
  }

 private:
  int key(double v) const { return static_cast<int>(std::floor(v / bucket_)); }
  static std::int64_t pack(int x, int y) { return (static_cast<std::int64_t>(x) << 32) ^ static_cast<std::uint32_t>(y); }

  const ArcPolyline& line_;
  double bucket_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace

namespace {

// Everything about a cell that does not depend on the speed parameters.
struct CellGeometry {
  std::size_t cell = 0;
  Vec2 downstream;
  int section = -1;
  double u_left = 0.0;
  double u_inner = -1.0;  // negative on straight segments
  double beta = 1.0;      // weight of the uniform mid value
};

struct FieldGeometry {
  std::vector<CellGeometry> cells;
};

FieldGeometry field_geometry(const RiverMap& map, const RiverModel& model, double blend_half_widths) {
  const BankContours& c = model.contours;
  const auto& segs = model.segments;
  const double downstream_sign = model.flow.upstream_is_increasing_arc() ? -1.0 : 1.0;
  const CenterlineIndex index(c.centerline, std::max(width_profile(c).max(), 4.0 * map.resolution()));

  FieldGeometry g;
  g.cells.reserve(map.free_count());
  for (int j = 0; j < map.height(); ++j)
    for (int i = 0; i < map.width(); ++i) {
      if (!map.is_free(i, j)) continue;
      const Vec2 p = map.cell_center(i, j);
      const double arc = index.nearest_arc(p);
      // Match the cell to the nearest stored cross-section so that every cell sharing a
      // section sees the same segment and blend weight.
      std::size_t k = c.section_index(arc);
      if (k + 1 < c.sections.size() && c.sections[k + 1].center_arc - arc < arc - c.sections[k].center_arc) ++k;
      const CrossSection& cs = c.sections[k];
      const double station = cs.center_arc;
      const Vec2 lr = cs.right - cs.left;

      CellGeometry cg;
      cg.cell = static_cast<std::size_t>(j) * map.width() + i;
      cg.downstream = c.tangent_at(station) * downstream_sign;
      cg.section = static_cast<int>(k);
      cg.u_left = std::clamp(dot(p - cs.left, lr) / std::max(dot(lr, lr), 1e-12), 0.0, 1.0);
      const std::size_t s = segment_at(segs, station);
      if (!segs[s].straight) {
        cg.u_inner = segs[s].inner_bank == Bank::Left ? cg.u_left : 1.0 - cg.u_left;
        // Fade towards the uniform mid value over the half-window at either interior end.
        const double h = std::max(blend_half_widths * cs.width(), 1e-9);
        const double to_start = s == 0 ? h : station - segs[s].start_arc;
        const double to_end = s + 1 == segs.size() ? h : segs[s].end_arc - station;
        cg.beta = std::clamp(1.0 - std::min(to_start, to_end) / h, 0.0, 1.0);
      }
      g.cells.push_back(cg);
    }
  return g;
}

void check_params(const FieldParams& params) {
  if (params.v_min < 0.0 || params.v_min > params.v_max || !std::isfinite(params.v_max))
    throw ValidationError("current field needs 0 <= v_min <= v_max");
  if (params.profile == SpeedProfile::PowerLaw && !(params.exponent > 0.0))
    throw ValidationError("power-law exponent must be positive");
}

CurrentField field_from_geometry(const RiverMap& map, const FieldGeometry& g, const FieldParams& params) {
  check_params(params);
  const double mid = 0.5 * (params.v_min + params.v_max);
  const double span = params.v_max - params.v_min;
  const std::size_t n = static_cast<std::size_t>(map.width()) * map.height();
  std::vector<Vec2> vel(n);
  std::vector<int> sec(n, -1);
  std::vector<double> cross(n, 0.0);
  for (const CellGeometry& cg : g.cells) {
    double mag = mid;
    if (cg.u_inner >= 0.0)
      mag = (1.0 - cg.beta) * (params.v_min + span * profile_value(params, cg.u_inner)) + cg.beta * mid;
    vel[cg.cell] = cg.downstream * mag;
    sec[cg.cell] = cg.section;
    cross[cg.cell] = cg.u_left;
  }
  CurrentField field(map, std::move(vel), params.v_min, params.v_max);
  field.set_sections(std::move(sec), std::move(cross));
  return field;
}

}  // namespace

CurrentField synth_current_field(const RiverMap& map, const RiverModel& model, const FieldParams& params) {
  check_params(params);
  return field_from_geometry(map, field_geometry(map, model, params.blend_half_widths), params);
}

namespace {

double path_time(const Polyline& path, const CurrentField& field, double boat_speed, double sub_step) {
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Vec2 a = path[k], b = path[k + 1];
    const double len = distance(a, b);
    if (len <= 0.0) continue;
    const Vec2 dir = (b - a) / len;
    const int n = std::max(1, static_cast<int>(std::ceil(len / sub_step)));
    const double piece = len / n;
    for (int q = 0; q < n; ++q) {
      const Vec2 m = a + dir * ((q + 0.5) * piece);
      const double ground = boat_speed + dot(field.at(m), dir);
      if (!(ground > 0.0)) throw ValidationError("ground speed is not positive; boat cannot make headway");
      t += piece / ground;
    }
  }
  return t;
}

void require_boat(const CurrentField& field, const BoatModel& boat) {
  if (!(boat.speed_through_water > field.v_max()))
    throw ValidationError("boat speed through water must exceed v_max");
  if (boat.turn_penalty < 0.0) throw ValidationError("turn penalty must be non-negative");
}

}  // namespace

double polyline_time(const Polyline& path, const CurrentField& field, double boat_speed) {
  return path_time(path, field, boat_speed, 0.5 * field.resolution());
}

TraversalReport traverse_time(const CoveragePlan& plan, const CurrentField& field, const BoatModel& boat) {
  require_boat(field, boat);
  TraversalReport r;
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k];
    LegTiming t;
    t.leg = k;
    t.kind = leg.kind;
    t.length = polyline_length(leg.path);
    t.time = path_time(leg.path, field, boat.speed_through_water, 0.5 * field.resolution());
    r.total_time += t.time;
    r.total_length += t.length;
    r.legs.push_back(t);
  }
  if (boat.turn_penalty > 0.0) {
    const Polyline p = dedupe(plan.path());
    double turned = 0.0;
    for (std::size_t k = 1; k + 1 < p.size(); ++k) turned += angle_between(p[k] - p[k - 1], p[k + 1] - p[k]);
    r.turn_time = boat.turn_penalty * turned;
    r.total_time += r.turn_time;
  }
  return r;
}

std::string Comparison::csv() const {
  std::string out = "algorithm,length_m,time_s,ratio_vs_best\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.3f,%.3f,%.6f\n", to_string(row.algorithm), row.length_m, row.time_s,
                  row.ratio_vs_best);
    out += buf;
  }
  return out;
}

std::string Comparison::verdict() const {
  if (rows.empty()) return "no plans";
  std::vector<std::size_t> order(rows.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].time_s < rows[b].time_s; });
  std::string out = std::string("fastest: ") + to_string(rows[order[0]].algorithm);
  if (order.size() > 1) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ", margin %.2f%% over %s", 100.0 * (rows[order[1]].time_s / rows[order[0]].time_s - 1.0),
                  to_string(rows[order[1]].algorithm));
    out += buf;
  }
  return out;
}

double Comparison::savings(Algorithm a, Algorithm b) const {
  const ComparisonRow* ra = nullptr;
  const ComparisonRow* rb = nullptr;
  for (const auto& row : rows) {
    if (row.algorithm == a && !ra) ra = &row;
    if (row.algorithm == b && !rb) rb = &row;
  }
  if (!ra || !rb) throw ValidationError("comparison has no row for the requested algorithm");
  return 1.0 - ra->time_s / rb->time_s;
}

Comparison compare_plans(const std::vector<CoveragePlan>& plans, const CurrentField& field, const BoatModel& boat) {
  Comparison c;
  for (const auto& plan : plans) {
    if (plan.map_id != field.map_id()) throw ValidationError("plan and current field were built on different maps");
    const TraversalReport r = traverse_time(plan, field, boat);
    c.rows.push_back({plan.algorithm, r.total_length, r.total_time, 1.0});
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : c.rows) best = std::min(best, row.time_s);
  for (auto& row : c.rows) row.ratio_vs_best = row.time_s / best;
  c.ratios.assign(c.rows.size(), std::vector<double>(c.rows.size(), 1.0));
  for (std::size_t a = 0; a < c.rows.size(); ++a)
    for (std::size_t b = 0; b < c.rows.size(); ++b) c.ratios[a][b] = c.rows[a].time_s / c.rows[b].time_s;
  return c;
}

Polyline outer_lane_track(const RiverModel& model) {
  Polyline track;
  for (const auto& seg : model.segments) {
    const auto lanes = lanes_for_block(model.contours, seg.start_arc, seg.end_arc, seg.inner_bank, 2, seg.id);
    const Polyline& p = lanes.back().polyline;
    track.insert(track.end(), p.begin(), p.end());
  }
  return dedupe(track);
}

namespace {

double lane_ratio(const RiverModel& model, const CurrentField& field, double boat_speed) {
  if (!(boat_speed > field.v_max())) throw ValidationError("boat speed through water must exceed v_max");
  Polyline up = outer_lane_track(model);
  if (!model.flow.upstream_is_increasing_arc()) std::reverse(up.begin(), up.end());
  const Polyline down(up.rbegin(), up.rend());
  return polyline_time(up, field, boat_speed) / polyline_time(down, field, boat_speed);
}

}  // namespace

double outer_lane_ratio(const RiverMap& map, const RiverModel& model, const FieldParams& params, double boat_speed) {
  return lane_ratio(model, synth_current_field(map, model, params), boat_speed);
}

FieldParams calibrate_field(const RiverMap& map, const RiverModel& model, FieldParams params, double boat_speed,
                            double target) {
  if (!(target >= 1.0)) throw ValidationError("calibration target must be at least 1");
  check_params({params.v_min, std::max(params.v_min, params.v_max), params.profile, params.exponent});
  const FieldGeometry g = field_geometry(map, model, params.blend_half_widths);
  auto ratio = [&](double v_max) {
    FieldParams p = params;
    p.v_max = v_max;
    return lane_ratio(model, field_from_geometry(map, g, p), boat_speed);
  };
  double lo = params.v_min;
  double hi = boat_speed * (1.0 - 1e-6);
  if (!(lo < hi)) throw ValidationError("v_min must be below the boat speed");
  if (ratio(lo) > target) throw ValidationError("v_min alone already exceeds the calibration target");
  if (ratio(hi) < target) throw ValidationError("calibration target is unreachable below the boat speed");
  for (int it = 0; it < 48 && hi - lo > 1e-10 * boat_speed; ++it) {
    const double m = 0.5 * (lo + hi);
    (ratio(m) < target ? lo : hi) = m;
  }
  params.v_max = 0.5 * (lo + hi);
  return params;
}

}  // namespace rivercover
