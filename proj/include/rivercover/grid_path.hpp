#pragma once

#include <optional>

#include "rivercover/geometry.hpp"
#include "rivercover/river_map.hpp"

namespace rivercover {

/// True when every cell the segment a-b touches is Free (supercover traversal;
/// passing exactly through a grid corner requires both side cells).
bool line_of_sight(const RiverMap& map, Vec2 a, Vec2 b);

/// Nearest Free cell centre to p, or p itself when its cell is Free.
Vec2 snap_to_free(const RiverMap& map, Vec2 p);

/// 8-connected A* over Free cells (no diagonal corner cutting), string-pulled by line
/// of sight. Endpoints are the given points; they are snapped into Free space first
/// when they fall on land. nullopt when the cells are disconnected.
std::optional<Polyline> free_space_path(const RiverMap& map, Vec2 from, Vec2 to);

}  // namespace rivercover
