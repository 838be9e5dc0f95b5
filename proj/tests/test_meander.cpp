#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rivercover/errors.hpp"
#include "rivercover/meander.hpp"
#include "rivercover/synthetic.hpp"
#include "oracles.hpp"

using namespace rivercover;

namespace {

constexpr double kPi = std::numbers::pi;

oracle::BendScore score_against_oracle(const synthetic::SyntheticRiver& river, double res) {
  return oracle::score_bends(river, res);
}

bool partitions(const std::vector<MeanderSegment>& segs, double length) {
  if (segs.empty() || segs.front().start_arc != 0.0 || segs.back().end_arc != length) return false;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!(segs[k].end_arc > segs[k].start_arc)) return false;
    if (k > 0 && segs[k].start_arc != segs[k - 1].end_arc) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("straight river has no bends and one segment") {
  const auto river = synthetic::straight(1000.0, 90.0);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto step = default_tangent_step(c);
  CHECK(step.delta_w == doctest::Approx(90.0 / 4.0).epsilon(0.05));
  for (const auto& l : classify_banks(m, c, step)) CHECK(l.label == BendLabel::Straight);
  const auto segs = get_meander_segments(m, c, get_downriver_direction(c, river.start()), step);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].straight);
  CHECK(partitions(segs, c.length()));
}

TEST_CASE("annulus: the inner radius bank is inner everywhere") {
  const auto river = synthetic::annulus(100.0, 180.0, kPi / 2);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto step = default_tangent_step(c);
  int classified = 0;
  for (const auto& l : classify_banks(m, c, step)) {
    if (l.label == BendLabel::Straight) continue;
    ++classified;
    CHECK(l.label == (l.bank == Bank::Left ? BendLabel::Inner : BendLabel::Outer));
  }
  CHECK(classified > 10);
  const auto segs = get_meander_segments(m, c, get_downriver_direction(c, river.start()), step);
  REQUIRE(segs.size() == 1);
  CHECK_FALSE(segs[0].straight);
  CHECK(segs[0].inner_bank == Bank::Left);
}

TEST_CASE("one sine period splits into two opposite bends") {
  const auto river = synthetic::sine(500.0, 50.0, 500.0, 80.0);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto step = default_tangent_step(c);
  const auto segs = get_meander_segments(m, c, get_downriver_direction(c, river.start()), step);
  REQUIRE(segs.size() == 2);
  // y = A sin(kx) turns right first.
  CHECK(segs[0].inner_bank == Bank::Right);
  CHECK(segs[1].inner_bank == Bank::Left);
  CHECK(partitions(segs, c.length()));
  // Boundary near the inflection at x = 250.
  const Vec2 b = c.centerline.at(segs[0].end_arc);
  CHECK(std::abs(b.x - 250.0) < step.delta_w * 2);
  // Apexes near the crests.
  CHECK(std::abs(segs[0].apex.x - 125.0) < 40.0);
  CHECK(std::abs(segs[1].apex.x - 375.0) < 40.0);
}

TEST_CASE("two sine periods give four alternating segments; mirroring swaps banks") {
  const auto a = synthetic::sine(1000.0, 50.0, 500.0, 80.0);
  const auto b = synthetic::sine(1000.0, -50.0, 500.0, 80.0);
  RiverMap ma = a.rasterize(2.0);
  RiverMap mb = b.rasterize(2.0);
  const auto ca = get_directional_contours(ma, a.start());
  const auto cb = get_directional_contours(mb, b.start());
  const auto sa = get_meander_segments(ma, ca, get_downriver_direction(ca, a.start()), default_tangent_step(ca));
  const auto sb = get_meander_segments(mb, cb, get_downriver_direction(cb, b.start()), default_tangent_step(cb));
  REQUIRE(sa.size() == 4);
  REQUIRE(sb.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(sa[k].inner_bank == (k % 2 == 0 ? Bank::Right : Bank::Left));
    CHECK(sb[k].inner_bank == opposite(sa[k].inner_bank));
    CHECK(std::abs(sa[k].end_arc - sb[k].end_arc) < 2 * default_tangent_step(ca).delta_w);
  }
}

TEST_CASE("S-curve with a straight tail: three segments and inherited polarity") {
  const auto river = synthetic::s_curve(200.0, kPi / 2, 300.0, 60.0);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto step = default_tangent_step(c);
  const auto down = get_downriver_direction(c, river.start());
  const auto segs = get_meander_segments(m, c, down, step);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].inner_bank == Bank::Left);
  CHECK(segs[1].inner_bank == Bank::Right);
  CHECK(segs[2].straight);
  CHECK(partitions(segs, c.length()));
  const double bend = 200.0 * kPi / 2;
  CHECK(std::abs(segs[0].end_arc - bend) < 2 * step.delta_w);
  CHECK(std::abs(segs[1].end_arc - 2 * bend) < 2 * step.delta_w);
  // Tail is the upstream-most reach here: nothing upstream, default Left.
  CHECK(segs[2].inner_bank == Bank::Left);
  // Start upstream: the upstream neighbour of the tail is the right-inner bend.
  const auto up = get_downriver_direction(c, river.start(), StartConvention::StartIsUpstreamEnd);
  CHECK(get_meander_segments(m, c, up, step)[2].inner_bank == Bank::Right);
}

TEST_CASE("bend labels agree with the curvature-centre oracle") {
  CHECK(score_against_oracle(synthetic::sine(1000.0, 50.0, 500.0, 80.0), 2.0).rate() >= 0.99);
  CHECK(score_against_oracle(synthetic::annulus(100.0, 180.0, kPi), 2.0).rate() >= 0.99);
  CHECK(score_against_oracle(synthetic::s_curve(200.0, kPi / 2, 300.0, 60.0), 2.0).rate() >= 0.99);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double width = 40.0 + 40.0 * u(rng);
    const double kmax = 1.0 / (3.0 * width);
    const double a1 = kmax * (0.3 + 0.4 * u(rng)), a2 = kmax * 0.3 * u(rng);
    const double l1 = 300.0 + 300.0 * u(rng), l2 = 150.0 + 100.0 * u(rng);
    const double p1 = 2 * kPi * u(rng), p2 = 2 * kPi * u(rng);
    const auto river = synthetic::from_curvature(
        1500.0, [=](double s) { return a1 * std::sin(2 * kPi * s / l1 + p1) + a2 * std::sin(2 * kPi * s / l2 + p2); },
        [=](double) { return width; });
    const auto sc = score_against_oracle(river, 2.0);
    CAPTURE(trial);
    CHECK(sc.total > 30);
    CHECK(sc.rate() >= 0.99);
  }
}

TEST_CASE("tangent step and range validation") {
  CHECK_THROWS_AS(TangentStep::checked(3.0, 2.0), ValidationError);
  CHECK_NOTHROW(TangentStep::checked(4.0, 2.0));
  const ArcPolyline line(Polyline{{0, 0}, {100, 0}});
  const auto t = tangent_at(line, 50.0, TangentStep{10.0});
  CHECK(t.direction.x == doctest::Approx(1.0));
  CHECK(t.anchor.x == doctest::Approx(50.0));
  CHECK_THROWS_AS(tangent_at(line, 2.0, TangentStep{10.0}), ValidationError);
}

TEST_CASE("segment and label exports") {
  const auto river = synthetic::sine(500.0, 50.0, 500.0, 80.0);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto step = default_tangent_step(c);
  const auto labels = classify_banks(m, c, step);
  const std::string csv = bend_labels_csv(labels);
  CHECK(csv.rfind("arc,bank,label\n", 0) == 0);
  CHECK(csv.find(",left,inner") != std::string::npos);
  CHECK(csv.find(",right,outer") != std::string::npos);
  const auto segs = segments_from_labels(c, labels, get_downriver_direction(c, river.start()), step);
  const std::string gj = segments_to_geojson(segs);
  CHECK(gj.find("\"inner_bank\": \"right\"") != std::string::npos);
  CHECK(segment_at(segs, 0.0) == 0);
  CHECK(segment_at(segs, c.length()) == 1);
}

TEST_CASE("secant tangent on analytic curves") {
  Polyline circle;
  for (int k = 0; k <= 3600; ++k) {
    const double a = -kPi / 2 + kPi * k / 3600.0;
    circle.push_back({100.0 * std::cos(a), 100.0 * std::sin(a)});
  }
  const ArcPolyline c(circle);
  const auto t = tangent_at(c, c.length() / 2, TangentStep{10.0});  // angle 0
  CHECK(angle_between(t.direction, {0.0, 1.0}) * 180 / kPi < 0.2);

  Polyline sine;
  for (double x = 0; x <= 500.0; x += 0.5) sine.push_back({x, 50.0 * std::sin(2 * kPi * x / 500.0)});
  const ArcPolyline s(sine);
  const double arc = s.project({125.0, 50.0}).arc;
  const auto ts = tangent_at(s, arc, TangentStep{10.0});
  CHECK(angle_between(ts.direction, {1.0, 0.0}) * 180 / kPi < 1.0);
}

TEST_CASE("halving the tangent step moves boundaries by less than the step") {
  const auto river = synthetic::sine(1000.0, 50.0, 500.0, 80.0);
  RiverMap m = river.rasterize(2.0);
  const auto c = get_directional_contours(m, river.start());
  const auto flow = get_downriver_direction(c, river.start());
  const auto step = default_tangent_step(c);
  const auto full = get_meander_segments(m, c, flow, step);
  const auto half = get_meander_segments(m, c, flow, TangentStep::checked(step.delta_w / 2, 2.0));
  REQUIRE(full.size() == half.size());
  for (std::size_t k = 0; k + 1 < full.size(); ++k) {
    CHECK(full[k].inner_bank == half[k].inner_bank);
    CHECK(std::abs(full[k].end_arc - half[k].end_arc) < step.delta_w);
  }
}
