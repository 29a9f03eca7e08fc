#include "oracles.hpp"
#include "worldfn/algebra.hpp"
#include "worldfn/geometries.hpp"
#include "worldfn/solvers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace worldfn;

namespace {

// Every representative re-verifies and representatives are separated.
void check_solution_set_invariants(const SolutionSet& s, const Residual& r) {
  for (std::size_t i = 0; i < s.representatives.size(); ++i) {
    CHECK(static_cast<double>(residual_norm(r(s.representatives[i]))) <= s.tolerance);
    CHECK(s.residual_norms[i] <= s.tolerance);
    for (std::size_t j = i + 1; j < s.representatives.size(); ++j)
      CHECK(distance(s.representatives[i], s.representatives[j]) > s.cluster_radius);
  }
  for (std::size_t i = 1; i < s.representatives.size(); ++i)
    CHECK(s.representatives[i - 1] < s.representatives[i]);
}

Residual equivalence(const WorldFunction& g, const PointPairVector& a, const Point& q0) {
  return [=](const Point& q1) -> ResidualVector {
    const auto r = equivalence_residual(g, a, {q0, q1});
    return {r.scalar, r.length};
  };
}

Point translate(const PointPairVector& a, const Point& q0) {
  Coords c = q0.coords();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += a.tip[i] - a.origin[i];
  return Point(std::move(c));
}

}  // namespace

TEST_CASE("grid points") {
  const auto pts = grid_points(Box::cube(2, 0, 1), 3);
  REQUIRE(pts.size() == 9);
  CHECK(pts.front() == Point{0, 0});
  CHECK(pts[1] == Point{0, 0.5});
  CHECK(pts.back() == Point{1, 1});
  CHECK_THROWS_AS(grid_points(Box::cube(3, 0, 1), 1000), ValidationError);
}

TEST_CASE("refine_to_zero converges on a simple root") {
  const Residual r = [](const Point& p) -> ResidualVector {
    return {static_cast<Real>(p[0]) * p[0] - 2, static_cast<Real>(p[1]) - 0.5};
  };
  const auto res = refine_to_zero(r, Point{1.0, 0.0}, 1e-6, 1e-12);
  CHECK(res.converged);
  CHECK(res.point[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(res.point[1] == doctest::Approx(0.5));
}

TEST_CASE("pca dimension") {
  std::vector<Point> line, plane, blob;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const double t = u(rng), s = u(rng);
    line.push_back(Point{t, 2 * t, -t});
    plane.push_back(Point{t, s, t + s});
    blob.push_back(Point{t, s, u(rng)});
  }
  CHECK(pca_dimension(line) == 1);
  CHECK(pca_dimension(plane) == 2);
  CHECK(pca_dimension(blob) == 3);
}

TEST_CASE("scalar zero sets") {
  SUBCASE("constant residual has no zeros") {
    const Residual one = [](const Point&) -> ResidualVector { return {1}; };
    const auto s = solve_scalar_zero_set(one, Box::cube(2, -1, 1));
    CHECK(s.empty());
    CHECK(s.count() == 0);
  }
  SUBCASE("sphere in E3 has local dimension 2") {
    const Residual sph = [](const Point& p) -> ResidualVector {
      Real s = 0;
      for (int i = 0; i < 3; ++i) s += static_cast<Real>(p[i]) * p[i];
      return {s - 0.25};
    };
    SolveOptions opt;
    opt.grid.points_per_axis = 17;
    const auto s = solve_scalar_zero_set(sph, Box::cube(3, -1, 1), opt);
    REQUIRE(s.count() == 1);
    CHECK(s.clusters[0].local_dimension == 2);
    for (const auto& p : s.representatives)
      CHECK(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) == doctest::Approx(0.5).epsilon(1e-8));
    check_solution_set_invariants(s, sph);
  }
  SUBCASE("F3 of a collinear E2 family recovers the segment") {
    const auto e2 = make_euclidean(2);
    const Point p0{0, 0}, p1{1, 0};
    const Residual f3 = [&](const Point& r) -> ResidualVector {
      return {triangle_functions(e2, p0, r, p1).f3};
    };
    const auto s = solve_scalar_zero_set(f3, Box{{-0.5, -0.5}, {1.5, 0.5}});
    REQUIRE(s.count() == 1);
    CHECK(s.clusters[0].local_dimension == 1);
    double xmin = 1, xmax = 0;
    for (const auto& p : s.representatives) {
      CHECK(std::fabs(p[1]) <= 1e-8);
      CHECK(p[0] >= -1e-8);
      CHECK(p[0] <= 1 + 1e-8);
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
    }
    CHECK(xmin <= 0.05);
    CHECK(xmax >= 0.95);
  }
}

TEST_CASE("solve_equivalence examples") {
  SUBCASE("E3 translate") {
    const auto e3 = make_euclidean(3);
    const PointPairVector a{{0, 0, 0}, {1, 0, 0}};
    const Point q0{0, 1, 0};
    SolveOptions opt;
    opt.grid.points_per_axis = 17;
    const auto s = solve_equivalence(e3, a, q0, Box::around(q0, 1.5), opt);
    REQUIRE(s.count() == 1);
    CHECK(s.clusters[0].local_dimension == 0);
    CHECK(distance(s.representatives[s.clusters[0].anchor], Point{1, 1, 0}) <= 1e-8);
    check_solution_set_invariants(s, equivalence(e3, a, q0));
  }
  SUBCASE("Minkowski spacelike continuum {(s, 1, ±s)}") {
    const auto m3 = make_minkowski(3);
    const PointPairVector a{{0, 0, 0}, {0, 1, 0}};
    const Point q0{0, 0, 0};
    const auto s = solve_equivalence(m3, a, q0, Box::cube(3, -2, 2));
    CHECK(s.has_continuum());
    CHECK(s.max_dimension() == 1);
    std::size_t plus = 0, minus = 0;
    for (const auto& p : s.representatives) {
      CHECK(p[1] == doctest::Approx(1).epsilon(1e-8));
      CHECK(std::fabs(std::fabs(p[0]) - std::fabs(p[2])) <= 1e-8);
      if (p[0] * p[2] > 1e-3) ++plus;
      if (p[0] * p[2] < -1e-3) ++minus;
    }
    CHECK(plus > 0);
    CHECK(minus > 0);
    check_solution_set_invariants(s, equivalence(m3, a, q0));
  }
  SUBCASE("Minkowski timelike is unique") {
    const auto m3 = make_minkowski(3);
    const auto s = solve_equivalence(m3, {{0, 0, 0}, {1, 0, 0}}, {0, 0, 0}, Box::cube(3, -2, 2));
    REQUIRE(s.count() == 1);
    CHECK(s.clusters[0].local_dimension == 0);
    CHECK(distance(s.representatives[0], Point{1, 0, 0}) <= 1e-8);
  }
  SUBCASE("discrete geometries are enumerated") {
    // square 0-1-2-3 with side 1
    const auto sq = make_tabulated({{0, 0.5, 1, 0.5}, {0.5, 0, 0.5, 1}, {1, 0.5, 0, 0.5}, {0.5, 1, 0.5, 0}});
    const auto s = solve_equivalence(sq, {Point::discrete(0), Point::discrete(1)}, Point::discrete(3), {});
    REQUIRE(s.count() == 1);
    CHECK(s.representatives[0] == Point::discrete(2));
  }
  SUBCASE("invalid inputs") {
    const auto e2 = make_euclidean(2);
    SolveOptions opt;
    opt.tolerance = 0;
    CHECK_THROWS_AS(solve_equivalence(e2, {{0, 0}, {1, 0}}, {0, 0}, Box::cube(2, -1, 1), opt),
                    ValidationError);
    CHECK_THROWS_AS(solve_equivalence(e2, {{0, 0}, {1, 0}}, {0, 0}, Box{{1, 1}, {0, 0}}), ValidationError);
  }
}

TEST_CASE("multivariance reports") {
  const auto e2 = make_euclidean(2);
  auto rep = multivariance_report(e2, {{0, 0}, {1, 0}}, {0.3, 0.7}, Box::cube(2, -3, 3));
  CHECK(rep.is_single_variant);
  CHECK(rep.count == 1);

  const auto m3 = make_minkowski(3);
  rep = multivariance_report(m3, {{0, 0, 0}, {0, 1, 0}}, {0, 0, 0}, Box::cube(3, -2, 2));
  CHECK_FALSE(rep.is_single_variant);
  CHECK(rep.continuum);
  CHECK(rep.dimensions == std::vector<int>{1});

  // The offset deformation cancels in the scalar product, leaving no solution.
  const auto off = make_deformed(e2, offset_deformation(1));
  rep = multivariance_report(off, {{0, 0}, {1, 0}}, {0.3, 0.7}, Box::cube(2, -3, 3));
  CHECK_FALSE(rep.is_single_variant);
  CHECK(rep.count == 0);

  const auto st = make_deformed(e2, quadratic_stretch(0.5));
  const PointPairVector a{{0, 0}, {1, 0}};
  const Point q0{0.3, 0.7};
  const auto s = solve_equivalence(st, a, q0, Box::cube(2, -3, 3));
  rep = summarize(s);
  CHECK_FALSE(rep.is_single_variant);
  CHECK(rep.count == 2);
  CHECK(rep.dimensions == std::vector<int>{0, 0});
  check_solution_set_invariants(s, equivalence(st, a, q0));
}

TEST_CASE("grid doubling never loses clusters in the canonical cases") {
  const auto e2 = make_euclidean(2);
  const auto st = make_deformed(e2, quadratic_stretch(0.5));
  const auto m3 = make_minkowski(3);
  struct Case {
    WorldFunction g;
    PointPairVector a;
    Point q0;
    Box region;
  };
  std::vector<Case> cases{{e2, {{0, 0}, {1, 0}}, {0.3, 0.7}, Box::cube(2, -3, 3)},
                          {st, {{0, 0}, {1, 0}}, {0.3, 0.7}, Box::cube(2, -3, 3)},
                          {m3, {{0, 0, 0}, {1, 0, 0}}, {0, 0, 0}, Box::cube(3, -2, 2)},
                          {m3, {{0, 0, 0}, {0, 1, 0}}, {0, 0, 0}, Box::cube(3, -2, 2)}};
  for (const auto& c : cases) {
    std::size_t previous = 0;
    for (std::size_t n : {9u, 17u, 33u}) {
      SolveOptions opt;
      opt.grid.points_per_axis = n;
      const auto s = solve_equivalence(c.g, c.a, c.q0, c.region, opt);
      CHECK(s.count() >= previous);
      previous = s.count();
    }
    CHECK(previous >= 1);
  }
}

TEST_CASE("Euclidean single-variance over random draws") {
  std::mt19937_64 rng(2024);
  for (std::size_t n : {2u, 3u}) {
    const auto g = make_euclidean(n);
    SolveOptions opt;
    opt.grid.points_per_axis = n == 2 ? 33 : 13;
    for (int i = 0; i < 100; ++i) {
      const PointPairVector a{oracle::random_point(rng, n), oracle::random_point(rng, n)};
      const Point q0 = oracle::random_point(rng, n);
      const double len = distance(a.origin, a.tip);
      if (len < 0.05) continue;
      const auto s = solve_equivalence(g, a, q0, Box::around(q0, 1.25 * len), opt);
      REQUIRE(s.count() == 1);
      CHECK(s.clusters[0].local_dimension == 0);
      CHECK(distance(s.representatives[s.clusters[0].anchor], translate(a, q0)) <= 1e-8);
    }
  }
}

TEST_CASE("Minkowski: timelike single-variant, spacelike multivariant") {
  std::mt19937_64 rng(99);
  const auto m3 = make_minkowski(3);
  std::uniform_real_distribution<double> u(-1, 1);
  SolveOptions opt;
  opt.grid.points_per_axis = 25;
  for (int i = 0; i < 5; ++i) {
    // timelike: |Δt| > |Δx|
    const double x = 0.5 * u(rng), y = 0.5 * u(rng), t = 1.0 + 0.5 * std::fabs(u(rng));
    const Point q0 = oracle::random_point(rng, 3, -0.5, 0.5);
    const PointPairVector a{{0, 0, 0}, {t, x, y}};
    const auto rep = multivariance_report(m3, a, q0, Box::around(q0, 2.0), opt);
    CHECK(rep.is_single_variant);
    const PointPairVector b{{0, 0, 0}, {0.3 * u(rng), 1.0, 0.3 * u(rng)}};
    const auto rb = multivariance_report(m3, b, q0, Box::around(q0, 2.0), opt);
    CHECK_FALSE(rb.is_single_variant);
    CHECK(rb.continuum);
  }
}
