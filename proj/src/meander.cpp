#include "rivercover/meander.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

constexpr double kParallelTolerance = 0.5 * std::numbers::pi / 180.0;
constexpr double kFarIntersection = 10.0;  // x local width
constexpr double kStraightRunAbsorb = 3.0;  // x delta_w
constexpr double kStraightRunWidths = 2.0;  // x local width
constexpr double kFitSpacing = 0.5;         // metres between tangent fit samples
constexpr double kProbeCells = 4.0;
constexpr double kProbeWidthCap = 0.4;

enum class Polarity { InnerLeft, InnerRight, None };

}  // namespace

const char* to_string(BendLabel label) {
  switch (label) {
    case BendLabel::Inner:
      return "inner";
    case BendLabel::Outer:
      return "outer";
    case BendLabel::Straight:
      return "straight";
  }
  return "?";
}

const char* to_string(Bank bank) { return bank == Bank::Left ? "left" : "right"; }

TangentStep TangentStep::checked(double delta_w, double resolution) {
  if (!(delta_w >= 2.0 * resolution))
    throw ValidationError("tangent step delta_w must be >= 2 * resolution");
  return TangentStep{delta_w};
}

TangentStep default_tangent_step(const BankContours& contours) {
  const double mean_width = width_profile(contours).mean();
  return TangentStep{std::max(4.0 * contours.resolution, mean_width / 4.0)};
}

TangentLine tangent_at(const ArcPolyline& contour, double arc, TangentStep step) {
  const double half = 0.5 * step.delta_w;
  if (arc < half - 1e-9 || arc > contour.length() - half + 1e-9)
    throw ValidationError("tangent arc out of range");
  const Vec2 d = normalized(contour.at(arc + half) - contour.at(arc - half));
  return {contour.at(arc), d};
}

TangentLine fitted_tangent_at(const ArcPolyline& contour, double arc, TangentStep step) {
  const TangentLine secant = tangent_at(contour, arc, step);
  const double half = 0.5 * step.delta_w;
  const int n = std::clamp(static_cast<int>(std::ceil(step.delta_w / kFitSpacing)) + 1, 3, 401);
  std::vector<Vec2> pts(static_cast<std::size_t>(n));
  Vec2 mean{};
  for (int k = 0; k < n; ++k) {
    pts[static_cast<std::size_t>(k)] = contour.at(arc - half + step.delta_w * k / (n - 1));
    mean += pts[static_cast<std::size_t>(k)];
  }
  mean = mean / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const Vec2 p : pts) {
    const Vec2 q = p - mean;
    sxx += q.x * q.x;
    sxy += q.x * q.y;
    syy += q.y * q.y;
  }
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  Vec2 d{std::cos(theta), std::sin(theta)};
  if (dot(d, secant.direction) < 0.0) d = -d;
  return {mean + d * dot(secant.anchor - mean, d), d};
}

BendTest bend_test(const RiverMap& map, const ArcPolyline& contour, double arc, TangentStep step,
                   double local_width) {
  const double half = 0.5 * step.delta_w;
  const TangentLine t1 = fitted_tangent_at(contour, arc - half, step);
  const TangentLine t2 = fitted_tangent_at(contour, arc + half, step);
  BendTest out;
  out.turn_rad = angle_between(t1.direction, t2.direction);
  const auto hit = line_intersection(t1.anchor, t1.direction, t2.anchor, t2.direction);
  if (out.turn_rad < kParallelTolerance || !hit) {
    out.parallel = true;
    return out;
  }
  out.intersection = *hit;
  if (distance(*hit, contour.at(arc)) > kFarIntersection * local_width) return out;

  const Vec2 mid = lerp(t1.anchor, t2.anchor, 0.5);
  const Vec2 normal = perp_left(normalized(t2.anchor - t1.anchor));
  const double offset = dot(*hit - mid, normal);
  // The simplified bank can sit 1.5 cells off the raster edge, so look well past it.
  const double reach = std::max(std::abs(offset), std::min(kProbeCells * map.resolution(), kProbeWidthCap * local_width));
  out.probe = mid + normal * (offset >= 0.0 ? reach : -reach);
  out.label = map.majority_free(out.probe) ? BendLabel::Inner : BendLabel::Outer;
  return out;
}

BendLabel classify_bend(const RiverMap& map, const ArcPolyline& contour, double arc, TangentStep step,
                        double local_width) {
  return bend_test(map, contour, arc, step, local_width).label;
}

std::vector<BankLabel> classify_banks(const RiverMap& map, const BankContours& contours, TangentStep step) {
  std::vector<BankLabel> out;
  const double dw = step.delta_w;
  const double length = contours.length();
  for (double t = dw; t <= length - dw + 1e-9; t += dw) {
    const CrossSection cs = contours.section_at(t);
    const double width = cs.width();
    const std::pair<Bank, const ArcPolyline*> banks[] = {{Bank::Left, &contours.left_bank},
                                                         {Bank::Right, &contours.right_bank}};
    for (const auto& [bank, poly] : banks) {
      BankLabel bl;
      bl.center_arc = t;
      bl.bank = bank;
      bl.bank_arc = bank == Bank::Left ? cs.left_arc : cs.right_arc;
      bl.point = bank == Bank::Left ? cs.left : cs.right;
      if (bl.bank_arc >= dw && bl.bank_arc <= poly->length() - dw)
        bl.label = classify_bend(map, *poly, bl.bank_arc, step, width);
      out.push_back(bl);
    }
  }
  return out;
}

namespace {

struct SampleRun {
  Polarity polarity;
  std::size_t first;
  std::size_t last;
  std::size_t size() const { return last - first + 1; }
};

std::vector<SampleRun> runs_of(const std::vector<Polarity>& p) {
  std::vector<SampleRun> runs;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (runs.empty() || runs.back().polarity != p[k])
      runs.push_back({p[k], k, k});
    else
      runs.back().last = k;
  }
  return runs;
}

}  // namespace

std::vector<MeanderSegment> segments_from_labels(const BankContours& contours, const std::vector<BankLabel>& labels,
                                                 const FlowDirection& flow, TangentStep step) {
  const double length = contours.length();
  if (contours.sections.size() < 2 || length <= 0.0) throw ValidationError("empty contours; no meander segments");
  const double dw = step.delta_w;

  std::vector<double> arcs;
  std::vector<Polarity> pol;
  for (std::size_t k = 0; k + 1 < labels.size(); k += 2) {
    const BendLabel l = labels[k].label;
    const BendLabel r = labels[k + 1].label;
    const int votes_left = (l == BendLabel::Inner) + (r == BendLabel::Outer);
    const int votes_right = (l == BendLabel::Outer) + (r == BendLabel::Inner);
    arcs.push_back(labels[k].center_arc);
    if (votes_left > 0 && votes_right == 0)
      pol.push_back(Polarity::InnerLeft);
    else if (votes_right > 0 && votes_left == 0)
      pol.push_back(Polarity::InnerRight);
    else
      pol.push_back(Polarity::None);
  }

  // Short straight runs are aliasing near inflections: split them between neighbours.
  auto runs = runs_of(pol);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const SampleRun& run = runs[r];
    if (run.polarity != Polarity::None) continue;
    const double run_width = contours.section_at(0.5 * (arcs[run.first] + arcs[run.last])).width();
    if (static_cast<double>(run.size()) * dw > std::max(kStraightRunAbsorb * dw, kStraightRunWidths * run_width))
      continue;
    const bool has_prev = r > 0;
    const bool has_next = r + 1 < runs.size();
    if (!has_prev && !has_next) continue;
    const std::size_t mid = run.first + run.size() / 2;
    for (std::size_t k = run.first; k <= run.last; ++k) {
      if (has_prev && (!has_next || k < mid))
        pol[k] = runs[r - 1].polarity;
      else
        pol[k] = runs[r + 1].polarity;
    }
  }
  // Single-sample flickers inside a uniform stretch.
  runs = runs_of(pol);
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    if (runs[r].size() == 1 && runs[r - 1].polarity == runs[r + 1].polarity &&
        runs[r].polarity != Polarity::None)
      pol[runs[r].first] = runs[r - 1].polarity;
  }
  runs = runs_of(pol);

  std::vector<MeanderSegment> segs;
  if (runs.empty()) {
    MeanderSegment s;
    s.start_arc = 0.0;
    s.end_arc = length;
    s.straight = true;
    segs.push_back(s);
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    MeanderSegment s;
    s.start_arc = r == 0 ? 0.0 : 0.5 * (arcs[runs[r - 1].last] + arcs[runs[r].first]);
    s.end_arc = r + 1 == runs.size() ? length : 0.5 * (arcs[runs[r].last] + arcs[runs[r + 1].first]);
    s.straight = runs[r].polarity == Polarity::None;
    s.inner_bank = runs[r].polarity == Polarity::InnerRight ? Bank::Right : Bank::Left;
    segs.push_back(s);
  }

  // Straight segments inherit the inner bank of the nearest upstream meander.
  const bool upstream_forward = flow.upstream_is_increasing_arc();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!segs[k].straight) continue;
    segs[k].inner_bank = Bank::Left;
    if (upstream_forward) {
      for (std::size_t m = k + 1; m < segs.size(); ++m)
        if (!segs[m].straight) {
          segs[k].inner_bank = segs[m].inner_bank;
          break;
        }
    } else {
      for (std::size_t m = k; m-- > 0;)
        if (!segs[m].straight) {
          segs[k].inner_bank = segs[m].inner_bank;
          break;
        }
    }
  }

  for (std::size_t k = 0; k < segs.size(); ++k) {
    MeanderSegment& s = segs[k];
    s.id = static_cast<int>(k);
    s.entry_section = contours.section_at(s.start_arc);
    s.exit_section = contours.section_at(s.end_arc);
    double best = -1.0;
    s.apex = contours.centerline.at(0.5 * (s.start_arc + s.end_arc));
    if (!s.straight) {
      for (double t = std::max(s.start_arc, dw); t <= std::min(s.end_arc, length - dw); t += 0.5 * dw) {
        const Vec2 a = contours.centerline.at(t - 0.5 * dw);
        const Vec2 b = contours.centerline.at(t);
        const Vec2 c = contours.centerline.at(t + 0.5 * dw);
        const double turn = angle_between(b - a, c - b);
        if (turn > best) {
          best = turn;
          s.apex = b;
        }
      }
    }
  }
  return segs;
}

std::vector<MeanderSegment> get_meander_segments(const RiverMap& map, const BankContours& contours,
                                                 const FlowDirection& flow, TangentStep step) {
  return segments_from_labels(contours, classify_banks(map, contours, step), flow, step);
}

std::size_t segment_at(const std::vector<MeanderSegment>& segments, double arc) {
  for (std::size_t k = 0; k < segments.size(); ++k)
    if (arc < segments[k].end_arc) return k;
  return segments.size() - 1;
}

std::string segments_to_geojson(const std::vector<MeanderSegment>& segments) {
  using nlohmann::json;
  json features = json::array();
  for (const auto& s : segments) {
    json coords = json::array({{s.entry_section.left.x, s.entry_section.left.y},
                               {s.entry_section.right.x, s.entry_section.right.y},
                               {s.exit_section.right.x, s.exit_section.right.y},
                               {s.exit_section.left.x, s.exit_section.left.y},
                               {s.entry_section.left.x, s.entry_section.left.y}});
    features.push_back({{"type", "Feature"},
                        {"properties",
                         {{"id", s.id},
                          {"inner_bank", s.straight ? "none" : to_string(s.inner_bank)},
                          {"straight", s.straight},
                          {"start_arc", s.start_arc},
                          {"end_arc", s.end_arc}}},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({coords})}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2);
}

std::string bend_labels_csv(const std::vector<BankLabel>& labels) {
  std::string out = "arc,bank,label\n";
  char buf[96];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, "%.3f,%s,%s\n", l.center_arc, to_string(l.bank), to_string(l.label));
    out += buf;
  }
  return out;
}

}  // namespace rivercover
