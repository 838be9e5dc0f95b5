#include "rivercover/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "rivercover/contours.hpp"
#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

const char* kUpstream = "#c0392b";
const char* kDownstream = "#1f6fb4";

struct Frame {
  double x0 = 0, y1 = 0, scale = 1;
  std::string pt(Vec2 p) const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", (p.x - x0) * scale, (y1 - p.y) * scale);
    return buf;
  }
  std::string centre(Vec2 p) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "cx=\"%.2f\" cy=\"%.2f\"", (p.x - x0) * scale, (y1 - p.y) * scale);
    return buf;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string points(const Frame& f, const Polyline& line) {
  std::string out;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (k) out += ' ';
    out += f.pt(line[k]);
  }
  return out;
}

void marker(std::string& out, const Frame& f, Vec2 p, bool inner, Bank bank, int segment, double r) {
  const std::string c = f.pt(p);
  const std::string x = c.substr(0, c.find(',')), y = c.substr(c.find(',') + 1);
  out += std::string("  <g class=\"bend ") + (inner ? "inner" : "outer") + "\" data-bank=\"" + to_string(bank) +
         "\" data-segment=\"" + std::to_string(segment) + "\">";
  out += "<circle " + f.centre(p) + " r=\"" + num(r) + "\" fill=\"" +
         (inner ? "#2d7d46" : "#ffffff") + "\" stroke=\"#2d7d46\" stroke-width=\"1.5\"/>";
  out += "<text x=\"" + x + "\" y=\"" + y + "\" dy=\"-" + num(r + 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + (inner ? "inner" : "outer") +
         "</text></g>\n";
}

}  // namespace

std::string render_svg(const RiverMap& map, const RiverModel& model, const CoveragePlan& plan,
                       const RenderOptions& options) {
  if (options.max_pixels < 16) throw ValidationError("render: max_pixels must be at least 16");
  const double res = map.resolution();
  const double wm = map.width() * res, hm = map.height() * res;
  Frame f;
  f.x0 = map.origin().x;
  f.y1 = map.origin().y + hm;
  f.scale = options.max_pixels / std::max(wm, hm);
  const double W = wm * f.scale, H = hm * f.scale;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
  out += "  <rect class=\"land\" x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" fill=\"#e8e2d0\"/>\n";

  // Water: every boundary loop in one even-odd path so islands stay holes.
  std::string d;
  for (const BoundaryLoop& loop : trace_free_boundaries(map)) {
    if (loop.points.size() < 3) continue;
    d += "M" + points(f, loop.points) + "Z";
  }
  out += "  <path class=\"water\" fill=\"#cfe6f5\" fill-rule=\"evenodd\" stroke=\"#7fa9c9\" stroke-width=\"1\" d=\"" +
         d + "\"/>\n";

  if (options.centerline)
    out += "  <polyline class=\"centerline\" fill=\"none\" stroke=\"#7fa9c9\" stroke-dasharray=\"6 4\" points=\"" +
           points(f, model.contours.centerline.points()) + "\"/>\n";

  const double stroke = std::clamp(plan.spacing * f.scale * 0.08, 1.0, 4.0);
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k];
    if (leg.path.size() < 2) continue;
    if (leg.kind == LegKind::Connector) {
      out += "  <polyline class=\"connector\" data-leg=\"" + std::to_string(k) +
             "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"" + num(stroke * 0.6) +
             "\" stroke-dasharray=\"3 3\" points=\"" + points(f, leg.path) + "\"/>\n";
      continue;
    }
    const char* dir = leg.direction ? to_string(*leg.direction) : "free";
    const char* colour = !leg.direction ? "#333333" : *leg.direction == TravelDirection::Upstream ? kUpstream : kDownstream;
    out += std::string("  <polyline class=\"lane ") + dir + "\" data-leg=\"" + std::to_string(k) + "\" data-lane=\"" +
           std::to_string(leg.lane_index) + "\" data-segment=\"" + std::to_string(leg.segment_id) +
           "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"" + num(stroke) + "\" points=\"" +
           points(f, leg.path) + "\"/>\n";
  }

  if (options.bend_markers) {
    const double r = 5.0;
    for (const MeanderSegment& seg : model.segments) {
      if (seg.straight) continue;
      const CrossSection sec = model.contours.section_at(0.5 * (seg.start_arc + seg.end_arc));
      const Bank outer = opposite(seg.inner_bank);
      marker(out, f, seg.inner_bank == Bank::Left ? sec.left : sec.right, true, seg.inner_bank, seg.id, r);
      marker(out, f, outer == Bank::Left ? sec.left : sec.right, false, outer, seg.id, r);
    }
  }

  out += "  <circle class=\"start\" " + f.centre(plan.start) + " r=\"6\" fill=\"#000000\"/>\n";
  out += "  <text x=\"8\" y=\"18\" font-size=\"13\" font-family=\"sans-serif\">" + std::string(to_string(plan.algorithm)) +
         "  s=" + num(plan.spacing) + " m  length=" + num(plan.length()) + " m</text>\n";
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out.flush()) throw std::runtime_error("failed writing " + path);
}

}  // namespace rivercover
