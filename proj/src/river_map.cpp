#include "rivercover/river_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

constexpr double kEarthRadius = 6378137.0;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

GeoReference::LatLon GeoReference::to_latlon(Vec2 p) const {
  const double lat0 = origin_lat * std::numbers::pi / 180.0;
  const double lat = origin_lat + p.y / kEarthRadius * 180.0 / std::numbers::pi;
  const double lon = origin_lon + p.x / (kEarthRadius * std::cos(lat0)) * 180.0 / std::numbers::pi;
  return {lat, lon};
}

Vec2 GeoReference::from_latlon(LatLon ll) const {
  const double lat0 = origin_lat * std::numbers::pi / 180.0;
  const double y = (ll.lat - origin_lat) * std::numbers::pi / 180.0 * kEarthRadius;
  const double x = (ll.lon - origin_lon) * std::numbers::pi / 180.0 * kEarthRadius * std::cos(lat0);
  return {x, y};
}

RiverMap::RiverMap(RasterGrid raster, double resolution, Vec2 origin, std::optional<GeoReference> geo)
    : width_(raster.width),
      height_(raster.height),
      resolution_(resolution),
      origin_(origin),
      geo_(geo),
      cells_(std::move(raster.cells)),
      open_(std::move(raster.open)) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw ValidationError("map resolution must be > 0 (got " + std::to_string(resolution) + ")");
  if (width_ < 3 || height_ < 3) throw ValidationError("map must be at least 3x3 cells");
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  if (cells_.size() != n) throw ValidationError("raster cell count does not match dimensions");
  if (open_.size() != n) open_.assign(n, 0);

  for (int j = 0; j < height_; ++j) {
    for (int i = 0; i < width_; ++i) {
      if (i == 0 || j == 0 || i == width_ - 1 || j == height_ - 1) {
        auto& c = cells_[index(i, j)];
        if (c == CellLabel::Free) open_[index(i, j)] = 1;
        c = CellLabel::Obstacle;
      }
    }
  }

  // Label 4-connected Free components, keep the largest.
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (cells_[s] != CellLabel::Free || comp[s] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++sizes[id];
      const int ci = static_cast<int>(c % width_);
      const int cj = static_cast<int>(c / width_);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ni = ci + di[k];
        const int nj = cj + dj[k];
        if (!in_bounds(ni, nj)) continue;
        const std::size_t nidx = index(ni, nj);
        if (cells_[nidx] == CellLabel::Free && comp[nidx] < 0) {
          comp[nidx] = id;
          stack.push_back(nidx);
        }
      }
    }
  }
  if (sizes.empty()) throw ValidationError("map has zero Free cells");
  const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t s = 0; s < n; ++s) {
    if (cells_[s] == CellLabel::Free && comp[s] != keep) {
      cells_[s] = CellLabel::Obstacle;
      ++discarded_;
    }
  }
  free_count_ = sizes[keep];

  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, &width_, sizeof width_);
  h = fnv1a(h, &height_, sizeof height_);
  h = fnv1a(h, &resolution_, sizeof resolution_);
  h = fnv1a(h, &origin_, sizeof origin_);
  h = fnv1a(h, cells_.data(), cells_.size());
  fingerprint_ = h;
}

CellLabel RiverMap::at(int i, int j) const {
  if (!in_bounds(i, j)) return CellLabel::Obstacle;
  return cells_[index(i, j)];
}

Vec2 RiverMap::cell_center(int i, int j) const {
  return {origin_.x + (i + 0.5) * resolution_, origin_.y + (j + 0.5) * resolution_};
}

CellIndex RiverMap::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

bool RiverMap::free_at(Vec2 p) const {
  const CellIndex c = cell_of(p);
  return is_free(c.i, c.j);
}

bool RiverMap::majority_free(Vec2 p) const {
  const CellIndex c = cell_of(p);
  int votes = 0;
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) votes += is_free(c.i + di, c.j + dj) ? 1 : 0;
  return votes >= 5;
}

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  in >> tok;
  return tok;
}

}  // namespace

RiverMap load_pgm(std::istream& in, double resolution, std::optional<GeoReference> geo) {
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("not a PGM raster (magic '" + magic + "')");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw IoError("malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError("malformed PGM header");
  RasterGrid raster{w, h, std::vector<CellLabel>(static_cast<std::size_t>(w) * h, CellLabel::Obstacle), {}};
  const double threshold = maxval / 2.0;
  std::vector<int> values(static_cast<std::size_t>(w) * h);
  if (magic == "P2") {
    for (auto& v : values) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw IoError("truncated PGM data");
      v = std::stoi(tok);
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(values.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError("truncated PGM data");
    for (std::size_t k = 0; k < values.size(); ++k)
      values[k] = bytes == 1 ? buf[k] : (buf[2 * k] << 8) | buf[2 * k + 1];
  }
  for (int r = 0; r < h; ++r) {
    const int j = h - 1 - r;
    for (int i = 0; i < w; ++i)
      if (values[static_cast<std::size_t>(r) * w + i] > threshold)
        raster.cells[static_cast<std::size_t>(j) * w + i] = CellLabel::Free;
  }
  return RiverMap(std::move(raster), resolution, {}, geo);
}

RiverMap load_pgm_file(const std::string& path, double resolution, std::optional<GeoReference> geo) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read map '" + path + "'");
  return load_pgm(in, resolution, geo);
}

void write_pgm(std::ostream& out, const RiverMap& map) {
  out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  for (int r = 0; r < map.height(); ++r) {
    const int j = map.height() - 1 - r;
    for (int i = 0; i < map.width(); ++i) out.put(map.is_free(i, j) ? static_cast<char>(255) : 0);
  }
}

RiverMap rasterize_polygon(const RiverPolygon& polygon, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("map resolution must be > 0");
  if (polygon.rings.empty() || polygon.rings[0].size() < 3) throw ValidationError("polygon needs >= 3 vertices");
  const Polyline& outer = polygon.rings[0];
  double minx = outer[0].x, maxx = outer[0].x, miny = outer[0].y, maxy = outer[0].y;
  for (const Vec2 p : outer) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const Vec2 origin{std::floor(minx / resolution) * resolution - resolution,
                    std::floor(miny / resolution) * resolution - resolution};
  const int w = static_cast<int>(std::ceil((maxx - origin.x) / resolution)) + 2;
  const int h = static_cast<int>(std::ceil((maxy - origin.y) / resolution)) + 2;
  RasterGrid raster{w, h, std::vector<CellLabel>(static_cast<std::size_t>(w) * h, CellLabel::Obstacle),
                    std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};

  // Scanline fill: per row, collect crossings of every ring edge with the centre line.
  const std::size_t ring_n = outer.size();
  for (int j = 0; j < h; ++j) {
    const double y = origin.y + (j + 0.5) * resolution;
    std::vector<double> xs;
    for (const auto& ring : polygon.rings) {
      const std::size_t n = ring.size();
      for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        const Vec2 p = ring[a];
        const Vec2 q = ring[b];
        if ((p.y > y) != (q.y > y)) xs.push_back((q.x - p.x) * (y - p.y) / (q.y - p.y) + p.x);
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = static_cast<int>(std::ceil((xs[k] - origin.x) / resolution - 0.5));
      const int i1 = static_cast<int>(std::floor((xs[k + 1] - origin.x) / resolution - 0.5));
      for (int i = std::max(i0, 0); i <= std::min(i1, w - 1); ++i)
        raster.cells[static_cast<std::size_t>(j) * w + i] = CellLabel::Free;
    }
  }

  for (const int e : polygon.open_edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= ring_n)
      throw ValidationError("open edge index " + std::to_string(e) + " out of range");
    const Vec2 a = outer[static_cast<std::size_t>(e)];
    const Vec2 b = outer[(static_cast<std::size_t>(e) + 1) % ring_n];
    const auto lo = std::min(a.x, b.x) - 2 * resolution, hi = std::max(a.x, b.x) + 2 * resolution;
    const auto ylo = std::min(a.y, b.y) - 2 * resolution, yhi = std::max(a.y, b.y) + 2 * resolution;
    for (int j = std::max(0, static_cast<int>((ylo - origin.y) / resolution));
         j <= std::min(h - 1, static_cast<int>((yhi - origin.y) / resolution)); ++j) {
      for (int i = std::max(0, static_cast<int>((lo - origin.x) / resolution));
           i <= std::min(w - 1, static_cast<int>((hi - origin.x) / resolution)); ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * w + i;
        if (raster.cells[idx] == CellLabel::Free) continue;
        const Vec2 c{origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
        const SegmentFoot foot = closest_on_segment(c, a, b);
        if (foot.t > 0.0 && foot.t < 1.0 && foot.dist < resolution) raster.open[idx] = 1;
      }
    }
  }
  return RiverMap(std::move(raster), resolution, origin, polygon.geo);
}

namespace {

using nlohmann::json;

Polyline parse_ring(const json& coords) {
  Polyline ring;
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2) throw ValidationError("GeoJSON coordinate must be [x, y]");
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

}  // namespace

RiverPolygon parse_geojson_polygon(const std::string& text, double* resolution_out) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("unreadable GeoJSON: ") + e.what());
  }
  json feature = doc;
  if (doc.value("type", "") == "FeatureCollection") {
    const auto& feats = doc.at("features");
    auto it = std::find_if(feats.begin(), feats.end(), [](const json& f) {
      return f.contains("geometry") && f["geometry"].value("type", "") == "Polygon";
    });
    if (it == feats.end()) throw ValidationError("FeatureCollection has no Polygon feature");
    feature = *it;
  }
  if (feature.value("type", "") != "Feature" || !feature.contains("geometry"))
    throw ValidationError("GeoJSON map must be a Feature with a Polygon geometry");
  const json& geom = feature["geometry"];
  if (geom.value("type", "") != "Polygon") throw ValidationError("GeoJSON geometry must be a Polygon");
  RiverPolygon poly;
  try {
    for (const auto& ring : geom.at("coordinates")) poly.rings.push_back(parse_ring(ring));
    const json props = feature.value("properties", json::object());
    if (resolution_out) *resolution_out = props.value("resolution_m", 0.0);
    if (props.contains("open_edges"))
      for (const auto& e : props["open_edges"]) poly.open_edges.push_back(e.get<int>());
    if (props.contains("origin_lat") && props.contains("origin_lon"))
      poly.geo = GeoReference{props["origin_lat"].get<double>(), props["origin_lon"].get<double>()};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed GeoJSON polygon: ") + e.what());
  }
  if (poly.open_edges.size() != 2)
    throw ValidationError("polygon map must declare exactly two open_edges (inlet and outlet)");
  return poly;
}

RiverMap load_geojson_map(const std::string& text, double resolution_override) {
  double res = 0.0;
  RiverPolygon poly = parse_geojson_polygon(text, &res);
  if (resolution_override > 0.0) res = resolution_override;
  if (!(res > 0.0)) throw ValidationError("GeoJSON map requires resolution_m > 0");
  return rasterize_polygon(poly, res);
}

std::string polygon_to_geojson(const RiverPolygon& polygon, double resolution) {
  json rings = json::array();
  for (const auto& ring : polygon.rings) {
    json r = json::array();
    for (const Vec2 p : ring) r.push_back({p.x, p.y});
    if (!ring.empty()) r.push_back({ring.front().x, ring.front().y});
    rings.push_back(r);
  }
  json props = {{"resolution_m", resolution}, {"open_edges", polygon.open_edges}};
  if (polygon.geo) {
    props["origin_lat"] = polygon.geo->origin_lat;
    props["origin_lon"] = polygon.geo->origin_lon;
  }
  json feature = {{"type", "Feature"},
                  {"properties", props},
                  {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}};
  return feature.dump(2);
}

RiverMap load_map_file(const std::string& path, double resolution, std::optional<GeoReference> geo) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "pgm") {
    if (!(resolution > 0.0)) throw ValidationError("PGM maps require --resolution > 0");
    return load_pgm_file(path, resolution, geo);
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot read map '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RiverMap map = load_geojson_map(ss.str(), resolution);
  if (geo) map.set_geo(geo);
  return map;
}

}  // namespace rivercover
