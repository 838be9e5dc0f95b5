#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "rivercover/current_sim.hpp"
#include "rivercover/errors.hpp"
#include "rivercover/synthetic.hpp"

using namespace rivercover;

namespace {

CurrentField uniform_field(const RiverMap& m, Vec2 v) {
  std::vector<Vec2> vel(static_cast<std::size_t>(m.width()) * m.height());
  for (int j = 0; j < m.height(); ++j)
    for (int i = 0; i < m.width(); ++i)
      if (m.is_free(i, j)) vel[static_cast<std::size_t>(j) * m.width() + i] = v;
  return CurrentField(m, vel, norm(v), norm(v));
}

double magnitude_at(const CurrentField& f, Vec2 p) { return norm(f.at(p)); }

// Sum of lane times when each lane runs in its assigned direction.
double lane_time(const std::vector<Pass>& lanes, const std::vector<bool>& upstream, const CurrentField& f,
                 const FlowDirection& flow, double boat) {
  double t = 0.0;
  for (std::size_t k = 0; k < lanes.size(); ++k) {
    Polyline p = lanes[k].polyline;
    const bool increasing = upstream[k] == flow.upstream_is_increasing_arc();
    if (!increasing) std::reverse(p.begin(), p.end());
    t += polyline_time(p, f, boat);
  }
  return t;
}

}  // namespace

TEST_CASE("traversal time matches closed forms in a uniform current") {
  const auto r = synthetic::straight(100, 20);
  const RiverMap m = r.rasterize(1.0);
  const CurrentField f = uniform_field(m, {1.0, 0.0});
  const Polyline with{{0.0, 0.0}, {100.0, 0.0}};
  const Polyline against{{100.0, 0.0}, {0.0, 0.0}};
  CHECK(polyline_time(with, f, 4.0) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(polyline_time(against, f, 4.0) == doctest::Approx(100.0 / 3.0).epsilon(1e-9));
  // Crossing the current costs plain length / boat speed.
  const Polyline across{{50.0, -8.0}, {50.0, 8.0}};
  CHECK(polyline_time(across, f, 4.0) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK_THROWS_AS(polyline_time(against, f, 1.0), ValidationError);
}

TEST_CASE("zero current gives length over speed plus turn penalties") {
  const auto r = synthetic::straight(400, 90);
  const RiverMap m = r.rasterize(2.0);
  const CoveragePlan plan = m_cover(m, r.start(), 30);
  const CurrentField f = uniform_field(m, {0.0, 0.0});
  const TraversalReport plain = traverse_time(plan, f, {2.0, 0.0});
  CHECK(plain.total_time == doctest::Approx(plan.length() / 2.0).epsilon(1e-9));
  CHECK(plain.total_length == doctest::Approx(plan.length()).epsilon(1e-9));
  CHECK(plain.turn_time == 0.0);

  const TraversalReport turns = traverse_time(plan, f, {2.0, 1.5});
  const Polyline p = dedupe(plan.path());
  double turned = 0.0;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) turned += angle_between(p[k] - p[k - 1], p[k + 1] - p[k]);
  CHECK(turns.turn_time == doctest::Approx(1.5 * turned));
  CHECK(turns.total_time == doctest::Approx(plain.total_time + 1.5 * turned));
  // A closed tour turns through at least a full circle.
  CHECK(turned >= 2 * std::numbers::pi - 1e-6);
}

TEST_CASE("doubling boat and current speeds halves the time") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  const CurrentField f = synth_current_field(m, model, {});
  const CoveragePlan plan = m_cover(m, r.start(), 40);
  const double t1 = traverse_time(plan, f, {2.0, 0.0}).total_time;
  const double t2 = traverse_time(plan, f.scaled(2.0), {4.0, 0.0}).total_time;
  CHECK(t2 == doctest::Approx(0.5 * t1).epsilon(1e-9));
}

TEST_CASE("annulus field runs from v_min at the inner bank to v_max at the outer") {
  const auto r = synthetic::annulus(100, 180, std::numbers::pi);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  REQUIRE(model.segments.size() == 1);
  FieldParams params;
  params.v_min = 0.2;
  params.v_max = 1.0;
  const CurrentField f = synth_current_field(m, model, params);
  const Vec2 dir{std::cos(std::numbers::pi / 2), std::sin(std::numbers::pi / 2)};
  CHECK(magnitude_at(f, dir * 102.0) == doctest::Approx(0.2).epsilon(0.05));
  CHECK(magnitude_at(f, dir * 178.0) == doctest::Approx(1.0).epsilon(0.05));
  // Monotone along the whole radius, inner to outer.
  double prev = -1.0;
  for (double rad = 101.0; rad <= 179.0; rad += 2.0) {
    const double v = magnitude_at(f, dir * rad);
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  // Current points downstream, towards the arc start when the start is the downstream end.
  const Vec2 v = f.at(dir * 140.0);
  const Vec2 t = model.contours.tangent_at(model.contours.centerline.project(dir * 140.0).arc);
  CHECK(dot(v, t) < 0.0);
  CHECK(std::abs(cross(v, t)) < 1e-9);
}

TEST_CASE("straight river has uniform mid current") {
  const auto r = synthetic::straight(400, 60);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  const CurrentField f = synth_current_field(m, model, {0.2, 1.0});
  for (double y = -28; y <= 28; y += 4) CHECK(magnitude_at(f, {200.0, y}) == doctest::Approx(0.6));
}

TEST_CASE("magnitude is monotone across every meander section") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  for (SpeedProfile profile : {SpeedProfile::Linear, SpeedProfile::PowerLaw}) {
    FieldParams params;
    params.profile = profile;
    params.exponent = 3.0;
    params.v_min = 0.0;
    const CurrentField f = synth_current_field(m, model, params);
    // Every Free cell, grouped by the section it was matched to.
    std::map<int, std::vector<std::pair<double, double>>> by_section;
    for (int j = 0; j < m.height(); ++j)
      for (int i = 0; i < m.width(); ++i) {
        if (!m.is_free(i, j)) continue;
        const int k = f.cell_section(i, j);
        REQUIRE(k >= 0);
        const double arc = model.contours.sections[k].center_arc;
        const auto& seg = model.segments[segment_at(model.segments, arc)];
        if (seg.straight) continue;
        const double u = f.cell_fraction_from_left(i, j);
        by_section[k].push_back({seg.inner_bank == Bank::Left ? u : 1.0 - u, norm(f.cell_velocity(i, j))});
        CHECK(norm(f.cell_velocity(i, j)) <= params.v_max + 1e-12);
      }
    CHECK(by_section.size() > 500);
    int bad = 0;
    for (auto& [k, cells] : by_section) {
      std::sort(cells.begin(), cells.end());
      for (std::size_t q = 1; q < cells.size(); ++q)
        if (cells[q].first > cells[q - 1].first && cells[q].second < cells[q - 1].second) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("calibration hits the outer-lane ratio") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  FieldParams params;
  params.v_min = 0.1;
  const FieldParams cal = calibrate_field(m, model, params, 2.0);
  CHECK(cal.v_max > cal.v_min);
  CHECK(cal.v_max < 2.0);
  CHECK(outer_lane_ratio(m, model, cal, 2.0) == doctest::Approx(1.47).epsilon(1e-4));
  CHECK_THROWS_AS(calibrate_field(m, model, params, 2.0, 50.0), ValidationError);
}

TEST_CASE("comparison table and verdicts") {
  const auto r = synthetic::sine(1200, 60, 600, 80);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  const CurrentField f = synth_current_field(m, model, calibrate_field(m, model, {}, 2.0));
  const CoveragePlan mc = m_cover(m, r.start(), 40);
  const CoveragePlan tc = t_cover(m, r.start(), 40);
  const Comparison same = compare_plans({mc, mc}, f, {});
  CHECK(same.ratios[0][1] == doctest::Approx(1.0));
  CHECK(same.rows[1].ratio_vs_best == doctest::Approx(1.0));

  const Comparison c = compare_plans({mc, tc}, f, {});
  CHECK(c.rows[1].time_s > c.rows[0].time_s);
  CHECK(c.savings(Algorithm::MCover, Algorithm::TCover) > 0.0);
  CHECK(c.csv().rfind("algorithm,length_m,time_s,ratio_vs_best\n", 0) == 0);
  CHECK(c.verdict().rfind("fastest: m-cover", 0) == 0);
  CHECK_THROWS_AS(c.savings(Algorithm::ZCover, Algorithm::MCover), ValidationError);

  const auto other = synthetic::straight(300, 40).rasterize(2.0);
  const CoveragePlan foreign = m_cover(other, {0.0, 0.0}, 15);
  CHECK_THROWS_AS(compare_plans({mc, foreign}, f, {}), ValidationError);
  CHECK_THROWS_AS(traverse_time(mc, f, {0.1, 0.0}), ValidationError);
}

TEST_CASE("M-Cover and L-Cover take the same time in a straight river") {
  // Two lanes each: both planners lay the same pair and run it the same way.
  const auto r = synthetic::straight(600, 50);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  const CurrentField f = synth_current_field(m, model, {0.2, 1.0});
  const double tm = traverse_time(m_cover(m, r.start(), 25), f, {}).total_time;
  const double tl = traverse_time(l_cover(m, r.start(), 25), f, {}).total_time;
  CHECK(std::abs(tm - tl) / tl < 1e-6);
}

TEST_CASE("inner-up assignment is optimal among balanced assignments") {
  const auto r = synthetic::sine(1200, 60, 600, 100);
  const RiverMap m = r.rasterize(2.0);
  const RiverModel model = build_river_model(m, r.start());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    FieldParams params;
    params.profile = trial % 2 ? SpeedProfile::PowerLaw : SpeedProfile::Linear;
    params.exponent = 0.5 + 3.5 * unit(rng);
    params.v_min = 0.3 * unit(rng);
    params.v_max = params.v_min + 0.2 + 0.8 * unit(rng);
    const double boat = params.v_max + 0.5 + 2.0 * unit(rng);
    const CurrentField f = synth_current_field(m, model, params);
    for (const auto& seg : model.segments) {
      if (seg.straight) continue;
      for (int k : {2, 4, 6}) {
        const auto lanes = lanes_for_block(model.contours, seg.start_arc, seg.end_arc, seg.inner_bank, k, seg.id);
        std::vector<bool> mcover(k, false);
        for (int j = 0; j < k / 2; ++j) mcover[j] = true;
        const double ours = lane_time(lanes, mcover, f, model.flow, boat);
        std::vector<bool> pick = mcover;
        std::sort(pick.begin(), pick.end());
        double best = ours;
        do best = std::min(best, lane_time(lanes, pick, f, model.flow, boat));
        while (std::next_permutation(pick.begin(), pick.end()));
        CHECK(ours <= best * (1.0 + 1e-9));
      }
    }
  }
}
