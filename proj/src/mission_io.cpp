#include "rivercover/mission_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>
#include <sstream>

#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

std::size_t vertex_count(const std::vector<PlanLeg>& legs) {
  CoveragePlan p;
  p.legs = legs;
  return p.path().size();
}

std::vector<PlanLeg> decimated_legs(const std::vector<PlanLeg>& legs, double tolerance) {
  std::vector<PlanLeg> out = legs;
  for (auto& leg : out) leg.path = douglas_peucker(leg.path, tolerance);
  return out;
}

const GeoReference& require_geo(const std::optional<GeoReference>& geo, MissionFormat f) {
  if (!geo) throw ValidationError(std::string(to_string(f)) + " export needs a geo reference");
  return *geo;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  // Keep "-0.000" out of the output so equal inputs serialise equally.
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string write_wpl(const Polyline& path, const GeoReference& geo, double altitude) {
  std::string out = "QGC WPL 110\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto ll = geo.to_latlon(path[k]);
    // Row 0 doubles as home; the rest are plain waypoints at relative altitude.
    out += std::to_string(k) + '\t' + (k == 0 ? "1" : "0") + '\t' + (k == 0 ? "0" : "3") + "\t16" +
           "\t0.000000\t0.000000\t0.000000\t0.000000\t" + fmt("%.7f", ll.lat) + '\t' + fmt("%.7f", ll.lon) + '\t' +
           fmt("%.3f", altitude) + "\t1\n";
  }
  return out;
}

std::string write_gpx(const Polyline& path, const GeoReference& geo, Algorithm algo) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<gpx version=\"1.1\" creator=\"rivercover\" xmlns=\"http://www.topografix.com/GPX/1/1\">\n";
  out += std::string("  <trk>\n    <name>") + to_string(algo) + "</name>\n    <trkseg>\n";
  for (const Vec2 p : path) {
    const auto ll = geo.to_latlon(p);
    out += "      <trkpt lat=\"" + fmt("%.7f", ll.lat) + "\" lon=\"" + fmt("%.7f", ll.lon) + "\"/>\n";
  }
  out += "    </trkseg>\n  </trk>\n</gpx>\n";
  return out;
}

std::string write_geojson(const CoveragePlan& plan) {
  char id[32];
  std::snprintf(id, sizeof id, "%016" PRIx64, plan.map_id);
  std::string out = "{\"type\":\"FeatureCollection\",\"rivercover\":{\"algorithm\":\"";
  out += to_string(plan.algorithm);
  out += "\",\"spacing\":" + fmt("%.3f", plan.spacing) + ",\"start\":[" + fmt("%.3f", plan.start.x) + "," +
         fmt("%.3f", plan.start.y) + "],\"map_id\":\"" + id + "\"},\"features\":[";
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k];
    if (k) out += ",";
    out += "\n{\"type\":\"Feature\",\"properties\":{\"leg\":" + std::to_string(k) + ",\"kind\":\"" +
           (leg.kind == LegKind::Lane ? "lane" : "connector") + "\",\"lane_index\":" +
           std::to_string(leg.lane_index) + ",\"lane_count\":" + std::to_string(leg.lane_count) +
           ",\"direction\":" + (leg.direction ? std::string("\"") + to_string(*leg.direction) + "\"" : "null") +
           ",\"segment_id\":" + std::to_string(leg.segment_id) +
           "},\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
    for (std::size_t q = 0; q < leg.path.size(); ++q) {
      if (q) out += ",";
      out += "[" + fmt("%.3f", leg.path[q].x) + "," + fmt("%.3f", leg.path[q].y) + "]";
    }
    out += "]}}";
  }
  out += "\n]}\n";
  return out;
}

Polyline read_wpl(const std::string& body, const GeoReference& geo) {
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || line.rfind("QGC WPL 110", 0) != 0)
    throw ValidationError("not a QGC WPL 110 file");
  Polyline out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(row, cell, '\t');) f.push_back(cell);
    if (f.size() != 12) throw ValidationError("WPL line " + std::to_string(lineno) + ": expected 12 fields");
    try {
      out.push_back(geo.from_latlon({std::stod(f[8]), std::stod(f[9])}));
    } catch (const std::logic_error&) {
      throw ValidationError("WPL line " + std::to_string(lineno) + ": malformed coordinate");
    }
  }
  return out;
}

Polyline read_gpx(const std::string& body, const GeoReference& geo, std::optional<Algorithm>* algo) {
  static const std::regex pt(R"re(<trkpt\s+lat="([^"]+)"\s+lon="([^"]+)")re");
  static const std::regex name(R"(<name>([^<]*)</name>)");
  Polyline out;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), pt); it != std::sregex_iterator(); ++it) {
    try {
      out.push_back(geo.from_latlon({std::stod((*it)[1]), std::stod((*it)[2])}));
    } catch (const std::logic_error&) {
      throw ValidationError("GPX trkpt with a malformed coordinate");
    }
  }
  std::smatch m;
  if (std::regex_search(body, m, name)) *algo = parse_algorithm(m[1].str());
  return out;
}

CoveragePlan read_geojson(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mission GeoJSON: ") + e.what());
  }
  CoveragePlan plan;
  try {
    if (j.contains("rivercover")) {
      const auto& meta = j.at("rivercover");
      if (auto a = parse_algorithm(meta.at("algorithm").get<std::string>())) plan.algorithm = *a;
      plan.spacing = meta.at("spacing").get<double>();
      plan.start = {meta.at("start").at(0).get<double>(), meta.at("start").at(1).get<double>()};
      plan.map_id = std::stoull(meta.at("map_id").get<std::string>(), nullptr, 16);
    }
    for (const auto& f : j.at("features")) {
      PlanLeg leg;
      const auto& props = f.at("properties");
      leg.kind = props.value("kind", "lane") == "lane" ? LegKind::Lane : LegKind::Connector;
      leg.lane_index = props.value("lane_index", -1);
      leg.lane_count = props.value("lane_count", 0);
      leg.segment_id = props.value("segment_id", -1);
      if (props.contains("direction") && props.at("direction").is_string())
        leg.direction = props.at("direction").get<std::string>() == "upstream" ? TravelDirection::Upstream
                                                                             : TravelDirection::Downstream;
      for (const auto& c : f.at("geometry").at("coordinates")) leg.path.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      plan.legs.push_back(std::move(leg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mission GeoJSON: ") + e.what());
  } catch (const std::logic_error&) {
    throw ValidationError("mission GeoJSON: malformed map_id");
  }
  return plan;
}

}  // namespace

const char* to_string(MissionFormat f) {
  switch (f) {
    case MissionFormat::QgcWpl110: return "wpl";
    case MissionFormat::Gpx: return "gpx";
    case MissionFormat::GeoJson: return "geojson";
  }
  return "?";
}

std::optional<MissionFormat> format_from_path(std::string_view path) {
  auto ends = [&](std::string_view ext) {
    return path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext;
  };
  if (ends(".waypoints") || ends(".wpl") || ends(".txt")) return MissionFormat::QgcWpl110;
  if (ends(".gpx")) return MissionFormat::Gpx;
  if (ends(".geojson") || ends(".json")) return MissionFormat::GeoJson;
  return std::nullopt;
}

CoveragePlan decimate_plan(const CoveragePlan& plan, std::size_t max_waypoints) {
  if (plan.legs.empty()) throw ValidationError("cannot export an empty plan");
  CoveragePlan out = plan;
  if (vertex_count(plan.legs) <= max_waypoints) return out;
  if (vertex_count(decimated_legs(plan.legs, std::numeric_limits<double>::infinity())) > max_waypoints)
    throw ValidationError("waypoint budget is smaller than two vertices per leg");
  double lo = 0.0, hi = 1.0;
  while (vertex_count(decimated_legs(plan.legs, hi)) > max_waypoints) hi *= 2.0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (vertex_count(decimated_legs(plan.legs, mid)) > max_waypoints ? lo : hi) = mid;
  }
  out.legs = decimated_legs(plan.legs, hi);
  return out;
}

MissionFile export_plan(const CoveragePlan& plan, MissionFormat format, const std::optional<GeoReference>& geo,
                        const ExportOptions& options) {
  const CoveragePlan d = decimate_plan(plan, options.max_waypoints);
  MissionFile file;
  file.format = format;
  switch (format) {
    case MissionFormat::QgcWpl110:
      file.body = write_wpl(d.path(), require_geo(geo, format), options.altitude);
      break;
    case MissionFormat::Gpx:
      file.body = write_gpx(d.path(), require_geo(geo, format), d.algorithm);
      break;
    case MissionFormat::GeoJson:
      file.body = write_geojson(d);
      break;
  }
  return file;
}

CoveragePlan import_plan(const MissionFile& file, const std::optional<GeoReference>& geo) {
  if (file.format == MissionFormat::GeoJson) return read_geojson(file.body);
  const GeoReference& g = require_geo(geo, file.format);
  std::optional<Algorithm> algo;
  PlanLeg leg;
  leg.kind = LegKind::Lane;
  leg.path = file.format == MissionFormat::Gpx ? read_gpx(file.body, g, &algo) : read_wpl(file.body, g);
  if (leg.path.empty()) throw ValidationError("mission file has no waypoints");
  CoveragePlan plan;
  if (algo) plan.algorithm = *algo;
  plan.start = leg.path.front();
  plan.legs.push_back(std::move(leg));
  return plan;
}

}  // namespace rivercover
