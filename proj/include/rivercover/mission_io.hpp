#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rivercover/planner.hpp"

namespace rivercover {

enum class MissionFormat { QgcWpl110, Gpx, GeoJson };

const char* to_string(MissionFormat f);
/// By extension: .waypoints/.wpl/.txt, .gpx, .geojson/.json.
std::optional<MissionFormat> format_from_path(std::string_view path);

struct MissionFile {
  MissionFormat format = MissionFormat::GeoJson;
  std::string body;
};

struct ExportOptions {
  std::size_t max_waypoints = 700;
  double altitude = 0.0;  // metres, WPL only
};

/// Douglas-Peucker on every leg with one shared tolerance, the smallest (to 1 mm) that
/// keeps the total vertex count, shared leg ends counted once, within the budget.
/// Throws ValidationError if even two vertices per leg do not fit.
CoveragePlan decimate_plan(const CoveragePlan& plan, std::size_t max_waypoints);

/// Lat/lon formats need a geo reference (ValidationError otherwise). GeoJSON is written
/// in the metric frame with per-leg properties and a plan-level "rivercover" member.
/// Coordinates carry 7 decimals in degrees and 3 in metres.
MissionFile export_plan(const CoveragePlan& plan, MissionFormat format, const std::optional<GeoReference>& geo,
                        const ExportOptions& options = {});

/// Inverse of export_plan. WPL and GPX come back as a single lane leg with no
/// direction or segment metadata; GeoJSON restores legs and their properties.
CoveragePlan import_plan(const MissionFile& file, const std::optional<GeoReference>& geo);

}  // namespace rivercover
