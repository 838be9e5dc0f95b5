#include "rivercover/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

// Douglas-Peucker tolerance and smoothing window for raw bank traces.
constexpr double kSimplifyTolerance = 1.5;  // x resolution
constexpr int kSmoothingWindow = 5;
constexpr double kMatchWindow = 0.05;  // arc-fraction search window for bank matching

struct LatticeVertex {
  Vec2 pos;
  bool opening = false;
};

}  // namespace

std::vector<BoundaryLoop> trace_free_boundaries(const RiverMap& map) {
  const int w = map.width();
  const int h = map.height();
  const double res = map.resolution();
  // Vertex ids: 2*(j*w+i) for the horizontal lattice edge (i,j)-(i+1,j),
  // 2*(j*w+i)+1 for the vertical lattice edge (i,j)-(i,j+1).
  const auto hid = [w](int i, int j) { return 2LL * (static_cast<long long>(j) * w + i); };
  const auto vid = [w](int i, int j) { return 2LL * (static_cast<long long>(j) * w + i) + 1; };
  std::vector<long long> next(2ULL * w * h, -1);

  const auto link = [&](long long a, long long b) { next[static_cast<std::size_t>(a)] = b; };

  for (int j = 0; j + 1 < h; ++j) {
    for (int i = 0; i + 1 < w; ++i) {
      const bool f0 = map.is_free(i, j);
      const bool f1 = map.is_free(i + 1, j);
      const bool f2 = map.is_free(i + 1, j + 1);
      const bool f3 = map.is_free(i, j + 1);
      const int mask = f0 | (f1 << 1) | (f2 << 2) | (f3 << 3);
      if (mask == 0 || mask == 15) continue;
      const long long e[4] = {hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)};
      const auto E = [&](int k) { return e[((k % 4) + 4) % 4]; };
      switch (mask) {
        case 5:  // corners 0 and 2 free, not 4-connected here
          link(E(0), E(3));
          link(E(2), E(1));
          break;
        case 10:
          link(E(1), E(0));
          link(E(3), E(2));
          break;
        default: {
          const int count = f0 + f1 + f2 + f3;
          if (count == 1) {
            const int k = f0 ? 0 : f1 ? 1 : f2 ? 2 : 3;
            link(E(k), E(k - 1));
          } else if (count == 3) {
            const int k = !f0 ? 0 : !f1 ? 1 : !f2 ? 2 : 3;
            link(E(k - 1), E(k));
          } else {
            const bool fs[4] = {f0, f1, f2, f3};
            for (int k = 0; k < 4; ++k) {
              if (fs[k] && fs[(k + 1) % 4]) {
                link(E(k + 1), E(k - 1));
                break;
              }
            }
          }
        }
      }
    }
  }

  const auto vertex = [&](long long id) {
    const int cell = static_cast<int>(id / 2);
    const int i = cell % w;
    const int j = cell / w;
    const bool horizontal = (id % 2) == 0;
    const int ni = horizontal ? i + 1 : i;
    const int nj = horizontal ? j : j + 1;
    const Vec2 c = map.cell_center(i, j);
    LatticeVertex v;
    v.pos = horizontal ? Vec2{c.x + 0.5 * res, c.y} : Vec2{c.x, c.y + 0.5 * res};
    v.opening = map.is_free(i, j) ? map.is_open(ni, nj) : map.is_open(i, j);
    return v;
  };

  std::vector<BoundaryLoop> loops;
  std::vector<bool> visited(next.size(), false);
  for (std::size_t s = 0; s < next.size(); ++s) {
    if (next[s] < 0 || visited[s]) continue;
    BoundaryLoop loop;
    long long cur = static_cast<long long>(s);
    while (cur >= 0 && !visited[static_cast<std::size_t>(cur)]) {
      visited[static_cast<std::size_t>(cur)] = true;
      const LatticeVertex v = vertex(cur);
      loop.points.push_back(v.pos);
      loop.opening.push_back(v.opening);
      cur = next[static_cast<std::size_t>(cur)];
    }
    loop.area = signed_area(loop.points);
    loops.push_back(std::move(loop));
  }
  std::sort(loops.begin(), loops.end(), [](const BoundaryLoop& a, const BoundaryLoop& b) { return a.area > b.area; });
  return loops;
}

namespace {

struct Run {
  std::size_t first = 0;  // index of first opening vertex
  std::size_t count = 0;
};

std::vector<Run> opening_runs(const std::vector<bool>& opening) {
  const std::size_t n = opening.size();
  std::vector<Run> runs;
  std::size_t start = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!opening[k]) {
      start = k;
      break;
    }
  }
  if (start == n) return runs;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t k = (start + step) % n;
    if (opening[k] && !opening[(k + n - 1) % n]) runs.push_back({k, 0});
    if (opening[k]) ++runs.back().count;
  }
  return runs;
}

Polyline cyclic_range(const Polyline& pts, std::size_t from, std::size_t to) {
  Polyline out;
  const std::size_t n = pts.size();
  for (std::size_t k = from;; k = (k + 1) % n) {
    out.push_back(pts[k]);
    if (k == to) break;
  }
  return out;
}

Polyline smooth_bank(const Polyline& raw, double res) {
  Polyline p = douglas_peucker(raw, kSimplifyTolerance * res);
  p = resample_uniform(p, res);
  p = moving_average(p, kSmoothingWindow);
  return dedupe(p);
}

std::vector<CrossSection> match_banks(const ArcPolyline& left, const ArcPolyline& right, double res) {
  const double ll = left.length();
  const double lr = right.length();
  const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(std::max(ll, lr) / res)) + 1);
  std::vector<CrossSection> out;
  out.reserve(n);
  double prev_right = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n - 1);
    CrossSection cs;
    cs.left_arc = f * ll;
    cs.left = left.at(cs.left_arc);
    if (k == 0) {
      cs.right_arc = 0.0;
      cs.right = right.front();
    } else if (k + 1 == n) {
      cs.right_arc = lr;
      cs.right = right.back();
    } else {
      // Inner and outer bank arcs drift apart by up to width x turning angle within a
      // bend, so the window never shrinks below a few local widths.
      const double local = distance(cs.left, right.at(f * lr));
      const double half = std::max(kMatchWindow * lr, 3.0 * local);
      const double lo = std::max(prev_right, f * lr - half);
      const double hi = std::max(lo, f * lr + half);
      const auto proj = right.project(cs.left, lo, hi);
      cs.right_arc = proj.arc;
      cs.right = proj.point;
    }
    prev_right = cs.right_arc;
    out.push_back(cs);
  }
  return out;
}

}  // namespace

BankContours get_directional_contours(const RiverMap& map, Vec2 start) {
  const double res = map.resolution();
  {
    const CellIndex c = map.cell_of(start);
    bool near = false;
    for (int dj = -2; dj <= 2 && !near; ++dj)
      for (int di = -2; di <= 2 && !near; ++di) near = map.is_free(c.i + di, c.j + dj);
    if (!near) throw ValidationError("start point is not within 2 cells of the river");
  }

  auto loops = trace_free_boundaries(map);
  if (loops.empty() || loops.front().area <= 0.0) throw ValidationError("river outline could not be traced");
  const BoundaryLoop& outer = loops.front();
  auto runs = opening_runs(outer.opening);
  if (runs.size() < 2)
    throw ValidationError("river touches fewer than two distinct open boundaries; cannot identify inlet/outlet");
  std::stable_sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.count > b.count; });
  runs.resize(2);

  const std::size_t n = outer.points.size();
  const auto centroid = [&](const Run& r) {
    Vec2 c{};
    for (std::size_t k = 0; k < r.count; ++k) c += outer.points[(r.first + k) % n];
    return c / static_cast<double>(r.count);
  };
  const bool first_is_start = distance(centroid(runs[0]), start) <= distance(centroid(runs[1]), start);
  const Run s_run = first_is_start ? runs[0] : runs[1];
  const Run f_run = first_is_start ? runs[1] : runs[0];
  const auto last_of = [n](const Run& r) { return (r.first + r.count - 1) % n; };

  // Counter-clockwise from the start opening to the far opening keeps water on the left.
  // Bank traces exclude the opening vertices, which sit half a cell inside the frame.
  Polyline right_raw = cyclic_range(outer.points, (last_of(s_run) + 1) % n, (f_run.first + n - 1) % n);
  Polyline left_raw = cyclic_range(outer.points, (last_of(f_run) + 1) % n, (s_run.first + n - 1) % n);
  std::reverse(left_raw.begin(), left_raw.end());
  if (left_raw.size() < 2 || right_raw.size() < 2) throw ValidationError("degenerate river banks");

  BankContours out;
  out.resolution = res;
  out.left_bank = ArcPolyline(smooth_bank(left_raw, res));
  out.right_bank = ArcPolyline(smooth_bank(right_raw, res));
  auto sections = match_banks(out.left_bank, out.right_bank, res);

  Polyline center;
  std::vector<CrossSection> kept;
  for (const auto& cs : sections) {
    const Vec2 m = cs.midpoint();
    if (!center.empty() && distance(center.back(), m) < 1e-6) continue;
    center.push_back(m);
    kept.push_back(cs);
  }
  out.centerline = ArcPolyline(center);
  for (std::size_t k = 0; k < kept.size(); ++k) kept[k].center_arc = out.centerline.arcs()[k];
  out.sections = std::move(kept);
  if (out.sections.size() < 2) throw ValidationError("river too short to build a centreline");
  return out;
}

std::size_t BankContours::section_index(double center_arc) const {
  const auto& arcs = centerline.arcs();
  auto it = std::upper_bound(arcs.begin(), arcs.end(), center_arc);
  std::size_t k = it == arcs.begin() ? 0 : static_cast<std::size_t>(it - arcs.begin()) - 1;
  return std::min(k, sections.size() - 1);
}

CrossSection BankContours::section_at(double center_arc) const {
  center_arc = std::clamp(center_arc, 0.0, length());
  const std::size_t k = section_index(center_arc);
  if (k + 1 >= sections.size()) return sections.back();
  const CrossSection& a = sections[k];
  const CrossSection& b = sections[k + 1];
  const double span = b.center_arc - a.center_arc;
  const double t = span > 0.0 ? (center_arc - a.center_arc) / span : 0.0;
  CrossSection cs;
  cs.left = lerp(a.left, b.left, t);
  cs.right = lerp(a.right, b.right, t);
  cs.left_arc = a.left_arc + (b.left_arc - a.left_arc) * t;
  cs.right_arc = a.right_arc + (b.right_arc - a.right_arc) * t;
  cs.center_arc = center_arc;
  return cs;
}

Vec2 BankContours::tangent_at(double center_arc) const {
  const double h = std::max(resolution, 1e-6);
  const double lo = std::max(0.0, center_arc - h);
  const double hi = std::min(length(), center_arc + h);
  return normalized(centerline.at(hi) - centerline.at(lo));
}

FlowDirection get_downriver_direction(const BankContours& contours, Vec2 start, StartConvention orientation) {
  const auto& c = contours.centerline;
  if (c.size() < 2) throw ValidationError("contours have no centreline");
  double minx = std::numeric_limits<double>::infinity(), miny = minx, maxx = -minx, maxy = -minx;
  for (const auto* bank : {&contours.left_bank, &contours.right_bank}) {
    for (const Vec2 p : bank->points()) {
      minx = std::min(minx, p.x);
      maxx = std::max(maxx, p.x);
      miny = std::min(miny, p.y);
      maxy = std::max(maxy, p.y);
    }
  }
  const double slack = 2.0 * contours.resolution;
  if (start.x < minx - slack || start.x > maxx + slack || start.y < miny - slack || start.y > maxy + slack)
    throw ValidationError("start point lies outside the river's bounding box");

  const double d0 = distance(start, c.front());
  const double d1 = distance(start, c.back());
  const double sample = c.length() / static_cast<double>(c.size() - 1);
  if (std::abs(d0 - d1) < sample)
    throw ValidationError("start point is equidistant from both river ends; flow direction is ambiguous");
  const double h = std::min(c.length() / 4.0, 10.0 * contours.resolution);
  FlowDirection flow;
  flow.orientation = orientation;
  flow.heading = d0 < d1 ? normalized(c.at(h) - c.front()) : normalized(c.at(c.length() - h) - c.back());
  return flow;
}

double WidthProfile::mean() const {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (const auto& w : samples) s += w.width;
  return s / static_cast<double>(samples.size());
}

double WidthProfile::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& w : samples) m = std::min(m, w.width);
  return m;
}

double WidthProfile::max() const {
  double m = 0.0;
  for (const auto& w : samples) m = std::max(m, w.width);
  return m;
}

double WidthProfile::at(double arc) const {
  if (samples.empty()) return 0.0;
  if (arc <= samples.front().arc) return samples.front().width;
  if (arc >= samples.back().arc) return samples.back().width;
  auto it = std::upper_bound(samples.begin(), samples.end(), arc,
                             [](double a, const WidthSample& s) { return a < s.arc; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (arc - a.arc) / (b.arc - a.arc);
  return a.width + (b.width - a.width) * t;
}

WidthProfile width_profile(const BankContours& contours) {
  WidthProfile p;
  p.samples.reserve(contours.sections.size());
  for (const auto& cs : contours.sections) p.samples.push_back({cs.center_arc, cs.width()});
  return p;
}

std::string contours_to_geojson(const BankContours& contours) {
  using nlohmann::json;
  const auto line = [](const Polyline& pts) {
    json coords = json::array();
    for (const Vec2 p : pts) coords.push_back({p.x, p.y});
    return coords;
  };
  json features = json::array();
  const std::pair<const char*, const ArcPolyline*> parts[] = {
      {"left_bank", &contours.left_bank}, {"right_bank", &contours.right_bank}, {"centerline", &contours.centerline}};
  for (const auto& [role, poly] : parts) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"role", role}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", line(poly->points())}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2);
}

}  // namespace rivercover
