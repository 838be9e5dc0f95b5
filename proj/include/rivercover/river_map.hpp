#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "rivercover/geometry.hpp"

namespace rivercover {

enum class CellLabel : std::uint8_t { Free = 0, Obstacle = 1 };

struct CellIndex {
  int i = 0;  // column, grows with x
  int j = 0;  // row, grows with y
  bool operator==(const CellIndex&) const = default;
};

/// Ties the metric frame to WGS84 through a local equirectangular projection
/// centred on the metric origin.
struct GeoReference {
  double origin_lat = 0.0;
  double origin_lon = 0.0;

  struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
  };
  LatLon to_latlon(Vec2 p) const;
  Vec2 from_latlon(LatLon ll) const;
};

/// Raw occupancy raster before normalization. Row 0 is the southern edge.
struct RasterGrid {
  int width = 0;
  int height = 0;
  std::vector<CellLabel> cells;
  /// Obstacle cells that stand for open water beyond the mapped reach.
  std::vector<std::uint8_t> open;
};

/// Binary river occupancy grid. After construction the frame is Obstacle and the
/// Free cells form a single 4-connected component.
class RiverMap {
 public:
  /// Normalizes `raster`: closes the frame (frame cells that were Free become open
  /// ends), keeps the largest 4-connected Free component. Throws ValidationError on
  /// resolution <= 0 or no Free cells.
  RiverMap(RasterGrid raster, double resolution, Vec2 origin = {},
           std::optional<GeoReference> geo = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  const std::optional<GeoReference>& geo() const { return geo_; }
  void set_geo(std::optional<GeoReference> geo) { geo_ = geo; }

  bool in_bounds(int i, int j) const { return i >= 0 && j >= 0 && i < width_ && j < height_; }
  CellLabel at(int i, int j) const;
  bool is_free(int i, int j) const { return in_bounds(i, j) && cells_[index(i, j)] == CellLabel::Free; }
  bool is_open(int i, int j) const { return in_bounds(i, j) && open_[index(i, j)] != 0; }

  Vec2 cell_center(int i, int j) const;
  CellIndex cell_of(Vec2 p) const;
  /// Out-of-bounds points count as land.
  bool free_at(Vec2 p) const;
  /// Majority vote over the 3x3 neighbourhood of the cell containing p.
  bool majority_free(Vec2 p) const;

  std::size_t free_count() const { return free_count_; }
  /// Free cells dropped because they were not in the largest component.
  std::size_t discarded_free_cells() const { return discarded_; }

  /// Stable 64-bit fingerprint of grid, resolution and origin.
  std::uint64_t fingerprint() const { return fingerprint_; }

  const std::vector<CellLabel>& cells() const { return cells_; }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * width_ + i; }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Vec2 origin_{};
  std::optional<GeoReference> geo_;
  std::vector<CellLabel> cells_;
  std::vector<std::uint8_t> open_;
  std::size_t free_count_ = 0;
  std::size_t discarded_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Reads a binary (P5) or ASCII (P2) PGM. Pixels brighter than mid-gray are Free.
RiverMap load_pgm(std::istream& in, double resolution, std::optional<GeoReference> geo = std::nullopt);
RiverMap load_pgm_file(const std::string& path, double resolution,
                       std::optional<GeoReference> geo = std::nullopt);

/// Writes the map as a binary PGM (Free = 255).
void write_pgm(std::ostream& out, const RiverMap& map);

/// River outline for rasterization: rings[0] is the outer boundary, further rings are
/// islands. `open_edges` index edges of rings[0] (edge k joins vertex k and k+1) that
/// are the inlet/outlet cross-sections.
struct RiverPolygon {
  std::vector<Polyline> rings;
  std::vector<int> open_edges;
  std::optional<GeoReference> geo;
};

/// A cell is Free when its centre lies inside the polygon (even-odd rule).
RiverMap rasterize_polygon(const RiverPolygon& polygon, double resolution);

/// Parses a GeoJSON Feature (or single-feature FeatureCollection) with a Polygon
/// geometry in metric coordinates and properties `resolution_m` and `open_edges`.
/// `resolution_override` > 0 replaces `resolution_m`.
RiverPolygon parse_geojson_polygon(const std::string& text, double* resolution_out);
RiverMap load_geojson_map(const std::string& text, double resolution_override = 0.0);
std::string polygon_to_geojson(const RiverPolygon& polygon, double resolution);

/// Dispatches on extension: .pgm or .geojson/.json.
RiverMap load_map_file(const std::string& path, double resolution, std::optional<GeoReference> geo);

}  // namespace rivercover
