#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rivercover/geometry.hpp"

using namespace rivercover;

TEST_CASE("line intersection and parallel lines") {
  auto p = line_intersection({0, 0}, {1, 0}, {5, -3}, {0, 1});
  REQUIRE(p);
  CHECK(p->x == doctest::Approx(5.0));
  CHECK(p->y == doctest::Approx(0.0));
  CHECK_FALSE(line_intersection({0, 0}, {1, 1}, {0, 1}, {2, 2}));
}

TEST_CASE("segments intersect including touching endpoints") {
  CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {1, 1}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("signed area is positive counter-clockwise") {
  Polyline sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(signed_area(sq) == doctest::Approx(4.0));
  Polyline cw(sq.rbegin(), sq.rend());
  CHECK(signed_area(cw) == doctest::Approx(-4.0));
  CHECK(point_in_rings({1, 1}, {sq}));
  CHECK_FALSE(point_in_rings({3, 1}, {sq}));
}

TEST_CASE("douglas-peucker keeps endpoints and respects tolerance") {
  Polyline pts;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  for (int k = 0; k <= 200; ++k) pts.push_back({k * 0.5, std::sin(k * 0.05) * 10.0 + noise(rng)});
  const double tol = 0.75;
  const Polyline s = douglas_peucker(pts, tol);
  CHECK(s.front() == pts.front());
  CHECK(s.back() == pts.back());
  CHECK(s.size() < pts.size());
  CHECK(max_deviation(pts, s) <= tol + 1e-12);
}

TEST_CASE("douglas-peucker collapses a straight line") {
  Polyline pts;
  for (int k = 0; k < 50; ++k) pts.push_back({k * 1.0, 2.0 * k});
  CHECK(douglas_peucker(pts, 1e-9).size() == 2);
}

TEST_CASE("uniform resampling preserves length and endpoints") {
  Polyline pts{{0, 0}, {10, 0}, {10, 7}};
  const Polyline r = resample_uniform(pts, 1.0);
  CHECK(r.front() == pts.front());
  CHECK(r.back() == pts.back());
  CHECK(r.size() == 18);
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(distance(r[k - 1], r[k]) <= 1.0 + 1e-9);
}

TEST_CASE("moving average fixes endpoints and leaves lines straight") {
  Polyline pts;
  for (int k = 0; k < 20; ++k) pts.push_back({k * 1.0, 3.0});
  const Polyline m = moving_average(pts, 5);
  CHECK(m.front() == pts.front());
  CHECK(m.back() == pts.back());
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(m[k].x == doctest::Approx(pts[k].x));
}

TEST_CASE("arc polyline interpolation and projection") {
  ArcPolyline a({{0, 0}, {10, 0}, {10, 10}});
  CHECK(a.length() == doctest::Approx(20.0));
  CHECK(a.at(15.0).y == doctest::Approx(5.0));
  CHECK(a.at(-3).x == doctest::Approx(0.0));
  const auto pr = a.project({12, 4});
  CHECK(pr.arc == doctest::Approx(14.0));
  CHECK(pr.dist == doctest::Approx(2.0));
  const auto win = a.project({12, 4}, 0.0, 8.0);
  CHECK(win.arc == doctest::Approx(8.0));
  const Polyline sl = a.slice(5.0, 15.0);
  CHECK(sl.size() == 3);
  CHECK(polyline_length(sl) == doctest::Approx(10.0));
}

TEST_CASE("simple polyline detection") {
  Polyline zig{{0, 0}, {1, 1}, {2, 0}, {3, 1}};
  CHECK(is_simple(zig));
  Polyline bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  CHECK_FALSE(is_simple(bow));
}
