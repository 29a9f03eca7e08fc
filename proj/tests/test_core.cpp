#include "oracles.hpp"
#include "worldfn/core.hpp"
#include "worldfn/geometries.hpp"

#include <doctest.h>

#include <random>

using namespace worldfn;

TEST_CASE("world_function examples") {
  const auto e2 = make_euclidean(2);
  CHECK(world_function(e2, {0, 0}, {3, 4}) == doctest::Approx(12.5).epsilon(1e-15));
  CHECK(world_function(e2, {0.3, -0.2}, {0.3, -0.2}) == 0);

  const auto m2 = make_minkowski(2);
  CHECK(world_function(m2, {0, 0}, {1, 0}) == doctest::Approx(0.5));
  CHECK(world_function(m2, {0, 0}, {0, 1}) == doctest::Approx(-0.5));
  CHECK(world_function(m2, {0.7, 0.1}, {0.7, 0.1}) == 0);
}

TEST_CASE("arity and carrier mismatches are domain errors") {
  const auto e2 = make_euclidean(2);
  CHECK_THROWS_AS(e2(Point{0, 0}, Point{1, 2, 3}), DomainError);
  CHECK_THROWS_AS(e2(Point{0, 0}, Point::discrete(1)), DomainError);
  const auto t = make_tabulated({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(t(Point::discrete(0), Point::discrete(2)), DomainError);
  CHECK_THROWS_AS(t(Point::discrete(0), Point{0.0}), DomainError);
}

TEST_CASE("point representation") {
  const Point c{1.0, 2.0};
  const Point d = Point::discrete(4);
  CHECK_FALSE(c.is_discrete());
  CHECK(d.is_discrete());
  CHECK(d.id() == 4);
  CHECK(c.arity() == 2);
  CHECK(d.arity() == 0);
  CHECK_THROWS_AS(c.id(), DomainError);
  CHECK_THROWS_AS(d.coords(), DomainError);
  CHECK(Point{1.0, 2.0} < Point{1.0, 3.0});
  CHECK(d < c);
}

TEST_CASE("pair vectors are ordered") {
  const PointPairVector a{{0, 0}, {1, 0}}, b{{1, 0}, {0, 0}};
  CHECK_FALSE(a == b);
  const PointPairVector z{{2, 2}, {2, 2}};
  CHECK(z == PointPairVector{z.tip, z.origin});
}

TEST_CASE("box validation and geometry") {
  CHECK_THROWS_AS(Box({{0, 0}, {1}}).validate(), ValidationError);
  CHECK_THROWS_AS(Box({{1}, {0}}).validate(), ValidationError);
  const Box b = Box::around(Point{1, 2}, 0.5);
  CHECK(b.lower == std::vector<double>{0.5, 1.5});
  CHECK(b.extent() == doctest::Approx(1.0));
  CHECK(b.contains(Point{1.2, 2.4}));
  CHECK_FALSE(b.contains(Point{1.6, 2.0}));
  CHECK(distance(Point{0, 0}, Point{3, 4}) == doctest::Approx(5));
}

TEST_CASE("symmetry and zero diagonal over 1e4 pairs, every built-in geometry") {
  std::mt19937_64 rng(17);
  std::vector<WorldFunction> gs{make_euclidean(3), make_minkowski(3),
                                make_deformed(make_euclidean(3), offset_deformation(1.0)),
                                make_deformed(make_euclidean(3), quadratic_stretch(0.5))};
  for (const auto& g : gs) {
    for (int i = 0; i < 10000; ++i) {
      const Point p = oracle::random_point(rng, 3), q = oracle::random_point(rng, 3);
      REQUIRE(g(p, q) == g(q, p));
      REQUIRE(g(p, p) == 0);
    }
  }
  std::vector<std::vector<double>> t(20, std::vector<double>(20));
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < i; ++j) t[i][j] = t[j][i] = u(rng);
  const auto tab = make_tabulated(t);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) {
      CHECK(tab(Point::discrete(i), Point::discrete(j)) == tab(Point::discrete(j), Point::discrete(i)));
      if (i == j) CHECK(tab(Point::discrete(i), Point::discrete(j)) == 0);
    }
}

TEST_CASE("kernel receives canonically ordered pairs") {
  int calls = 0;
  Point first;
  WorldFunction g("probe", Domain::continuous(1, Box::cube(1, -1, 1)),
                  [&](const Point& p, const Point& q) -> Real {
                    ++calls;
                    first = p;
                    return p[0] - q[0];  // deliberately antisymmetric
                  });
  const Real a = g(Point{0.5}, Point{-0.5}), b = g(Point{-0.5}, Point{0.5});
  CHECK(a == b);
  CHECK(first == Point{-0.5});
  CHECK(calls == 2);
  CHECK(g(Point{0.1}, Point{0.1}) == 0);
  CHECK(calls == 2);
}
