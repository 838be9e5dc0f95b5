#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rivercover/errors.hpp"
#include "rivercover/mission_io.hpp"
#include "rivercover/synthetic.hpp"

using namespace rivercover;

namespace {

const GeoReference kGeo{33.8056, -80.9434};

int count_of(const std::string& s, const std::string& needle) {
  int n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

// Plan with one dense lane leg: `n` vertices along a gentle sine.
CoveragePlan dense_plan(int n) {
  CoveragePlan plan;
  plan.spacing = 40;
  PlanLeg leg;
  leg.kind = LegKind::Lane;
  for (int k = 0; k < n; ++k) {
    const double x = 0.5 * k;
    leg.path.push_back({x, 30.0 * std::sin(x / 200.0) + 2.0 * std::sin(x / 7.0)});
  }
  plan.legs.push_back(leg);
  plan.start = leg.path.front();
  return plan;
}

}  // namespace

TEST_CASE("rectangle plan exports one GPX track and one WPL row per vertex") {
  const auto r = synthetic::straight(400, 50);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = m_cover(m, r.start(), 25);
  const std::size_t vertices = decimate_plan(plan, 700).path().size();
  const MissionFile gpx = export_plan(plan, MissionFormat::Gpx, kGeo);
  CHECK(count_of(gpx.body, "<trk>") == 1);
  CHECK(count_of(gpx.body, "<trkpt ") == static_cast<int>(vertices));
  CHECK(gpx.body.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<gpx version=\"1.1\"", 0) == 0);

  const MissionFile wpl = export_plan(plan, MissionFormat::QgcWpl110, kGeo);
  CHECK(wpl.body.rfind("QGC WPL 110\n", 0) == 0);
  CHECK(count_of(wpl.body, "\n") == static_cast<int>(vertices) + 1);
  std::istringstream in(wpl.body);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(count_of(row, "\t") == 11);
  CHECK(row.rfind("0\t1\t0\t16\t", 0) == 0);
}

TEST_CASE("decimation meets the budget within a quarter spacing") {
  const CoveragePlan plan = dense_plan(10000);
  const CoveragePlan d = decimate_plan(plan, 700);
  const Polyline full = plan.path(), cut = d.path();
  CHECK(cut.size() <= 700);
  CHECK(cut.size() > 100);
  CHECK(max_deviation(full, cut) < plan.spacing / 4);
  CHECK(cut.front() == full.front());
  CHECK(cut.back() == full.back());
  const MissionFile wpl = export_plan(plan, MissionFormat::QgcWpl110, kGeo);
  CHECK(count_of(wpl.body, "\n") == static_cast<int>(cut.size()) + 1);
  CHECK_THROWS_AS(decimate_plan(plan, 1), ValidationError);
  CHECK(decimate_plan(plan, 20000).path().size() == 10000);
}

TEST_CASE("GeoJSON round trip keeps coordinates and leg metadata") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = m_cover(m, r.start(), 40);
  const MissionFile out = export_plan(plan, MissionFormat::GeoJson, std::nullopt);
  const CoveragePlan back = import_plan(out, std::nullopt);
  const CoveragePlan d = decimate_plan(plan, 700);
  REQUIRE(back.legs.size() == d.legs.size());
  CHECK(back.algorithm == plan.algorithm);
  CHECK(back.map_id == plan.map_id);
  CHECK(back.spacing == doctest::Approx(plan.spacing));
  for (std::size_t k = 0; k < d.legs.size(); ++k) {
    CHECK(back.legs[k].kind == d.legs[k].kind);
    CHECK(back.legs[k].lane_index == d.legs[k].lane_index);
    CHECK(back.legs[k].segment_id == d.legs[k].segment_id);
    CHECK(back.legs[k].direction == d.legs[k].direction);
    REQUIRE(back.legs[k].path.size() == d.legs[k].path.size());
    for (std::size_t q = 0; q < d.legs[k].path.size(); ++q)
      CHECK(distance(back.legs[k].path[q], d.legs[k].path[q]) <= 0.5e-3 * std::sqrt(2.0) + 1e-9);
  }
  // Written values are fixed points of the round trip.
  const MissionFile again = export_plan(back, MissionFormat::GeoJson, std::nullopt);
  CHECK(again.body == out.body);
  const CoveragePlan twice = import_plan(again, std::nullopt);
  for (std::size_t k = 0; k < back.legs.size(); ++k)
    for (std::size_t q = 0; q < back.legs[k].path.size(); ++q)
      CHECK(distance(twice.legs[k].path[q], back.legs[k].path[q]) <= 1e-9);
}

TEST_CASE("GPX and WPL round trips to 1e-7 degrees") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = l_cover(m, r.start(), 40);
  const Polyline expected = decimate_plan(plan, 700).path();
  for (MissionFormat f : {MissionFormat::Gpx, MissionFormat::QgcWpl110}) {
    const MissionFile out = export_plan(plan, f, kGeo);
    const CoveragePlan back = import_plan(out, kGeo);
    REQUIRE(back.legs.size() == 1);
    const Polyline got = back.path();
    REQUIRE(got.size() == expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      const auto a = kGeo.to_latlon(got[k]), b = kGeo.to_latlon(expected[k]);
      CHECK(std::abs(a.lat - b.lat) <= 0.5e-7 + 1e-12);
      CHECK(std::abs(a.lon - b.lon) <= 0.5e-7 + 1e-12);
    }
    CHECK(!back.legs[0].direction.has_value());
    CHECK(export_plan(back, f, kGeo).body == out.body);
  }
  CHECK(import_plan(export_plan(plan, MissionFormat::Gpx, kGeo), kGeo).algorithm == Algorithm::LCover);
}

TEST_CASE("mission export errors and determinism") {
  const CoveragePlan plan = dense_plan(50);
  CHECK_THROWS_AS(export_plan(plan, MissionFormat::Gpx, std::nullopt), ValidationError);
  CHECK_THROWS_AS(export_plan(plan, MissionFormat::QgcWpl110, std::nullopt), ValidationError);
  CHECK_THROWS_AS(export_plan(CoveragePlan{}, MissionFormat::GeoJson, std::nullopt), ValidationError);
  CHECK_THROWS_AS(import_plan({MissionFormat::QgcWpl110, "hello\n"}, kGeo), ValidationError);
  CHECK_THROWS_AS(import_plan({MissionFormat::GeoJson, "{"}, std::nullopt), ValidationError);
  CHECK(export_plan(plan, MissionFormat::Gpx, kGeo).body == export_plan(plan, MissionFormat::Gpx, kGeo).body);
  CHECK(format_from_path("a/b.gpx") == MissionFormat::Gpx);
  CHECK(format_from_path("mission.waypoints") == MissionFormat::QgcWpl110);
  CHECK(format_from_path("plan.geojson") == MissionFormat::GeoJson);
  CHECK(!format_from_path("plan.svg"));
}
