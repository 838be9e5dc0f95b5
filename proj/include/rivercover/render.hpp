#pragma once

#include <string>

#include "rivercover/planner.hpp"

namespace rivercover {

struct RenderOptions {
  /// Longest image side in pixels; the scale follows from the map extent.
  int max_pixels = 1200;
  bool bend_markers = true;
  bool centerline = true;
};

/// Static SVG of the water area, the plan and the meander segments. Lanes carry
/// class "lane upstream|downstream|free", connectors class "connector", bend markers
/// class "bend inner|outer" with data-bank and data-segment attributes. Output depends
/// only on the inputs.
std::string render_svg(const RiverMap& map, const RiverModel& model, const CoveragePlan& plan,
                       const RenderOptions& options = {});

/// Writes `body` to `path`; throws std::runtime_error if the file cannot be written.
void write_text_file(const std::string& path, const std::string& body);

}  // namespace rivercover
