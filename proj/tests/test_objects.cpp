#include "oracles.hpp"
#include "worldfn/algebra.hpp"
#include "worldfn/geometries.hpp"
#include "worldfn/objects.hpp"
#include "worldfn/riemann.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace worldfn;

namespace {

SamplingSpec spec_for(Box region, std::size_t n = 33) {
  SamplingSpec s;
  s.region = std::move(region);
  s.points_per_axis = n;
  return s;
}

// Chart distance from p to the segment [a, b].
double dist_to_segment(const Point& p, const Point& a, const Point& b) {
  const auto pa = oracle::diff(oracle::coords(a), oracle::coords(p));
  const auto ab = oracle::diff(oracle::coords(a), oracle::coords(b));
  double t = oracle::dot(pa, ab) / oracle::dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  double s = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += (pa[i] - t * ab[i]) * (pa[i] - t * ab[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("segment examples in E2") {
  const auto e2 = make_euclidean(2);
  const auto s = spec_for(Box{{-0.5, -0.5}, {2.5, 0.5}});
  const Point p0{0, 0}, p1{2, 0};
  const auto tri = segment_by_triangle(e2, p0, p1, s);
  const auto par = segment_by_parallelism(e2, p0, p1, s);
  REQUIRE_FALSE(tri.empty());
  REQUIRE_FALSE(par.empty());
  CHECK(tri.local_dimension == 1);
  CHECK(par.local_dimension == 1);
  for (const auto* set : {&tri, &par})
    for (const auto& p : set->points) CHECK(dist_to_segment(p, p0, p1) <= 1e-6);
  CHECK(tri.recheck() <= tri.tolerance);
  CHECK(par.recheck() <= par.tolerance);

  const auto c = set_coincidence(tri, par);
  CHECK(c.threshold == doctest::Approx(tri.resolution + par.resolution));
  CHECK(c.coincide);

  // Endpoints are covered.
  double d0 = 1, d1 = 1;
  for (const auto& p : tri.points) d0 = std::min(d0, distance(p, p0)), d1 = std::min(d1, distance(p, p1));
  CHECK(d0 <= tri.resolution);
  CHECK(d1 <= tri.resolution);
}

TEST_CASE("segment in E3 follows the parametric line") {
  const auto e3 = make_euclidean(3);
  const Point p0{0, 0, 0}, p1{1, 1, 0.5};
  const auto s = spec_for(Box{{-0.3, -0.3, -0.3}, {1.3, 1.3, 0.8}}, 17);
  const auto tri = segment_by_triangle(e3, p0, p1, s);
  REQUIRE_FALSE(tri.empty());
  CHECK(tri.local_dimension == 1);
  for (const auto& p : tri.points) CHECK(dist_to_segment(p, p0, p1) <= 1e-5);
}

TEST_CASE("degenerate and indefinite segments") {
  const auto e2 = make_euclidean(2);
  const auto s = spec_for(Box{{-1, -1}, {1, 1}});
  const auto one = segment_by_triangle(e2, Point{0.25, 0.25}, Point{0.25, 0.25}, s);
  REQUIRE(one.size() == 1);
  CHECK(one.points[0] == Point{0.25, 0.25});

  const auto m2 = make_minkowski(2);
  // x1 only: σ = −0.5 < 0
  CHECK_THROWS_AS(segment_by_triangle(m2, Point{0, 0}, Point{0, 1}, s), IndefiniteError);
  CHECK_THROWS_AS(segment_by_parallelism(m2, Point{0, 0}, Point{0, 1}, s), IndefiniteError);
  CHECK_THROWS_AS(segment_by_triangle(make_tabulated({{0, 1}, {1, 0}}), Point::discrete(0),
                                      Point::discrete(1), s),
                  DomainError);
  auto bad = s;
  bad.points_per_axis = 1;
  CHECK_THROWS_AS(segment_by_triangle(e2, Point{0, 0}, Point{1, 0}, bad), ValidationError);
}

TEST_CASE("straight of the first kind") {
  const auto e2 = make_euclidean(2);
  const auto s = spec_for(Box{{-2, -1}, {2, 1}});
  const Point p0{0, 0}, p1{1, 0};
  const auto line = straight_first_kind(e2, p0, p1, s);
  REQUIRE_FALSE(line.empty());
  CHECK(line.local_dimension == 1);
  double xmin = 9, xmax = -9;
  for (const auto& p : line.points) {
    CHECK(std::fabs(p[1]) <= 1e-6);
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
  }
  // Spans the region, beyond the two defining points.
  CHECK(xmin <= -2 + line.resolution);
  CHECK(xmax >= 2 - line.resolution);
  CHECK_THROWS_AS(straight_first_kind(e2, p0, p0, s), DegenerateError);
}

TEST_CASE("straight of the first kind on the sphere is a great circle") {
  const auto wf = make_sphere_analytic(1.0);
  const auto s = spec_for(Box{{0.3, -1.2}, {2.8, 1.2}});
  const Point p0{M_PI / 2, -0.5}, p1{M_PI / 2, 0.5};
  const auto a = straight_first_kind(wf, p0, p1, s);
  REQUIRE_FALSE(a.empty());
  CHECK(a.local_dimension == 1);
  for (const auto& p : a.points) CHECK(std::fabs(p[0] - M_PI / 2) <= 1e-6);
}

TEST_CASE("straight of the second kind") {
  const auto e2 = make_euclidean(2);
  const auto s = spec_for(Box{{-2, -1}, {2, 1}});
  const Point p0{0, 0}, p1{1, 0};
  SUBCASE("Q0 = P0 reproduces the first kind") {
    const auto a = straight_first_kind(e2, p0, p1, s);
    const auto b = straight_second_kind(e2, p0, p1, p0, s);
    CHECK(set_coincidence(a, b).coincide);
  }
  SUBCASE("Q0 off the line gives the parallel line") {
    const auto b = straight_second_kind(e2, p0, p1, Point{0.3, 0.5}, s);
    REQUIRE_FALSE(b.empty());
    CHECK(b.local_dimension == 1);
    for (const auto& p : b.points) CHECK(std::fabs(p[1] - 0.5) <= 1e-6);
    const auto base = straight_first_kind(e2, p0, p1, s);
    // Samples along the two lines are not aligned, so H sits within one
    // covering radius above the line spacing.
    const double h = set_coincidence(base, b).hausdorff;
    CHECK(h >= 0.5 - 1e-6);
    CHECK(h <= std::hypot(0.5, base.resolution + b.resolution));
  }
  CHECK_THROWS_AS(straight_second_kind(e2, p0, p0, p1, s), DegenerateError);
}

TEST_CASE("straight of the second kind on the sphere") {
  const auto wf = make_sphere_analytic(1.0);
  const auto s = spec_for(Box{{0.3, -1.2}, {2.8, 1.2}});
  const Point p0{M_PI / 2, -0.5}, p1{M_PI / 2, 0.5}, q0{1.2, 0.0};
  const auto b = straight_second_kind(wf, p0, p1, q0, s);
  REQUIRE_FALSE(b.empty());
  CHECK(b.recheck() <= b.tolerance);
  // One scalar condition in a 2-D chart: the zero set is curves.
  CHECK(b.local_dimension == 1);
  double tmin = 9, tmax = -9;
  for (const auto& p : b.points) tmin = std::min(tmin, p[0]), tmax = std::max(tmax, p[0]);
  CHECK(tmax - tmin >= 0.2);

  // Gram < 0 on a region of positive area next to Q0.
  std::size_t negative = 0;
  const PointPairVector a{p0, p1};
  for (const auto& v : grid_points(Box{{1.0, -0.6}, {1.6, 0.6}}, 41)) {
    if (v == q0) continue;
    if (pair_gram(wf, a, {q0, v}) < -1e-9) ++negative;
  }
  CHECK(negative >= 10);
}

TEST_CASE("cylinder in E3") {
  const auto e3 = make_euclidean(3);
  const Point p0{0, 0, 0}, p1{0, 0, 1};
  auto s = spec_for(Box{{-1.5, -1.5, -0.5}, {1.5, 1.5, 1.5}}, 21);
  s.mask = radial_shell(p0, p1, 0.3, 1.5);
  const auto c = cylinder(e3, p0, p1, Point{1, 0, 0}, s);
  REQUIRE_FALSE(c.empty());
  CHECK(c.local_dimension == 2);
  for (const auto& p : c.points) CHECK(std::hypot(p[0], p[1]) == doctest::Approx(1.0).epsilon(1e-6));

  SUBCASE("Q on the axis gives the axis") {
    auto sa = spec_for(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 1.5}}, 17);
    const auto axis = cylinder(e3, p0, p1, Point{0, 0, 0.5}, sa);
    REQUIRE_FALSE(axis.empty());
    CHECK(axis.local_dimension == 1);
    for (const auto& p : axis.points) CHECK(std::hypot(p[0], p[1]) <= 1e-4);
  }
  SUBCASE("shifting the axis leaves the Euclidean cylinder unchanged") {
    const auto shifted = cylinder(e3, p0, Point{0, 0, 2}, Point{1, 0, 0}, s);
    CHECK(set_coincidence(c, shifted).coincide);
  }
  CHECK_THROWS_AS(cylinder(e3, p0, p0, Point{1, 0, 0}, s), DegenerateError);
  CHECK_THROWS_AS(radial_shell(p0, p0, 0.1, 1), DegenerateError);
}

TEST_CASE("deformed cylinder splits under an axis shift") {
  const auto d = make_deformed(make_euclidean(3), offset_deformation(1.0));
  const Point p0{0, 0, 0}, p1{0, 0, 1}, p1s{0, 0, 2}, q{1, 0, 0};
  auto s = spec_for(Box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 3.5}}, 25);
  s.mask = radial_shell(p0, p1, 0.3, 1.5);
  const auto a = cylinder(d, p0, p1, q, s);
  const auto b = cylinder(d, p0, p1s, q, s);
  REQUIRE_FALSE(a.empty());
  REQUIRE_FALSE(b.empty());
  const auto c = set_coincidence(a, b);
  CHECK_FALSE(c.coincide);
  CHECK(c.hausdorff > 1.0);
  CHECK(c.hausdorff > 5 * c.threshold / 2);
}

TEST_CASE("set coincidence") {
  const auto e2 = make_euclidean(2);
  const auto s = spec_for(Box{{-2, -2}, {2, 2}});
  const auto a = straight_first_kind(e2, Point{0, 0}, Point{1, 0}, s);
  const auto self = set_coincidence(a, a);
  CHECK(self.hausdorff == 0);
  CHECK(self.coincide);
  const auto b = straight_first_kind(e2, Point{0, 1}, Point{1, 1}, s);
  const double h = set_coincidence(a, b).hausdorff;
  CHECK(h >= 1 - 1e-6);
  CHECK(h <= std::hypot(1.0, a.resolution + b.resolution));
  CHECK_FALSE(set_coincidence(a, b).coincide);
  CHECK_THROWS_AS(set_coincidence(a, SampledPointSet{}), ValidationError);
  CHECK(hausdorff_distance({Point{0, 0}}, {Point{3, 4}}) == doctest::Approx(5.0));
}

TEST_CASE("triangle axiom violations") {
  const Point p0{0, 0}, p1{2, 0};
  const auto s = spec_for(Box{{-1, -1.5}, {3, 1.5}});
  CHECK(triangle_axiom_violations(make_euclidean(2), p0, p1, s).empty());
  const auto bad = triangle_axiom_violations(make_deformed(make_euclidean(2), quadratic_stretch(0.5)), p0, p1, s);
  REQUIRE_FALSE(bad.empty());
  // The collinear midpoint is inside the violation region.
  const auto has_mid = std::any_of(bad.begin(), bad.end(), [](const Point& p) { return distance(p, Point{1, 0}) < 0.2; });
  CHECK(has_mid);
}
