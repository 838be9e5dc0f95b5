#include <doctest.h>

#include <regex>
#include <stdexcept>

#include "rivercover/render.hpp"
#include "rivercover/synthetic.hpp"

using namespace rivercover;

namespace {

std::vector<std::smatch> all(const std::string& s, const std::regex& re) {
  std::vector<std::smatch> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) out.push_back(*it);
  return out;
}

}  // namespace

TEST_CASE("straight river renders two parallel lanes") {
  const auto r = synthetic::straight(400, 90);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = m_cover(m, r.start(), 45);
  const std::string svg = render_svg(m, build_river_model(m, r.start()), plan);
  const auto lanes = all(svg, std::regex("<polyline class=\"lane (upstream|downstream)\"[^>]*points=\"([^\"]*)\""));
  REQUIRE(lanes.size() == 2);
  CHECK(lanes[0][1] != lanes[1][1]);
  // Both lanes are horizontal lines in image space, at different heights.
  std::vector<double> ys;
  for (const auto& l : lanes) {
    const std::string coords = l[2].str();
    const auto pts = all(coords, std::regex("([-0-9.]+),([-0-9.]+)"));
    REQUIRE(pts.size() >= 2);
    const double y0 = std::stod(pts.front()[2]);
    for (const auto& p : pts) CHECK(std::stod(p[2]) == doctest::Approx(y0).epsilon(0.01));
    ys.push_back(y0);
  }
  CHECK(std::abs(ys[0] - ys[1]) > 10.0);
  CHECK(svg.find("class=\"bend inner\"") == std::string::npos);
}

TEST_CASE("sine river inner markers alternate banks") {
  const auto r = synthetic::sine(1800, 120, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  const std::string svg = render_svg(m, model, m_cover(m, r.start(), 40));
  const auto inner = all(svg, std::regex("class=\"bend inner\" data-bank=\"(\\w+)\""));
  const auto outer = all(svg, std::regex("class=\"bend outer\" data-bank=\"(\\w+)\""));
  REQUIRE(inner.size() >= 4);
  REQUIRE(outer.size() == inner.size());
  for (std::size_t k = 0; k < inner.size(); ++k) {
    CHECK(inner[k][1] != outer[k][1]);
    if (k) CHECK(inner[k][1] != inner[k - 1][1]);
  }
  CHECK(svg.find("class=\"lane upstream\"") != std::string::npos);
  CHECK(svg.find("class=\"lane downstream\"") != std::string::npos);
  CHECK(svg.find("class=\"connector\"") != std::string::npos);
}

TEST_CASE("render is byte-identical and reports unwritable output") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = l_cover(m, r.start(), 40);
  const std::string a = render_svg(m, build_river_model(m, r.start()), plan);
  const std::string b = render_svg(m, build_river_model(m, r.start()), plan);
  CHECK(a == b);
  CHECK(a.rfind("<?xml", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x.svg", a), std::runtime_error);
}
