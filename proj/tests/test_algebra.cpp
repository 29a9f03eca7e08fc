#include "oracles.hpp"
#include "worldfn/algebra.hpp"
#include "worldfn/geometries.hpp"
#include "worldfn/riemann.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace worldfn;

namespace {
double d(Real v) { return static_cast<double>(v); }
}  // namespace

TEST_CASE("scalar product examples") {
  const auto e2 = make_euclidean(2), e3 = make_euclidean(3);
  CHECK(scalar_product(e2, {{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}) == 0);
  const PointPairVector a{{0.2, -0.4}, {0.9, 0.3}};
  CHECK(scalar_product(e2, a, a) == 2 * e2(a.origin, a.tip));
  // stated points: b = (1,−1,0)
  CHECK(d(scalar_product(e3, {{0, 0, 0}, {1, 2, 3}}, {{1, 1, 1}, {2, 0, 1}})) == doctest::Approx(-1));
  // b = (1,−1,−2) reproduces 1·1 + 2·(−1) + 3·(−2)
  CHECK(d(scalar_product(e3, {{0, 0, 0}, {1, 2, 3}}, {{1, 1, 1}, {2, 0, -1}})) == doctest::Approx(-7));
}

TEST_CASE("scalar product equals the coordinate dot product in E_n") {
  std::mt19937_64 rng(23);
  for (std::size_t n : {2u, 3u, 5u}) {
    const auto g = make_euclidean(n);
    for (int i = 0; i < 10000; ++i) {
      const Point a0 = oracle::random_point(rng, n), a1 = oracle::random_point(rng, n),
                  b0 = oracle::random_point(rng, n), b1 = oracle::random_point(rng, n);
      const double sp = d(scalar_product(g, {a0, a1}, {b0, b1}));
      REQUIRE(std::fabs(sp - oracle::vector_dot(a0, a1, b0, b1)) <= 1e-12);
    }
  }
}

TEST_CASE("scalar product symmetry and self product in every geometry") {
  std::mt19937_64 rng(4);
  for (const auto& g : {make_minkowski(3), make_deformed(make_euclidean(3), offset_deformation(1)),
                        make_deformed(make_euclidean(3), quadratic_stretch(0.5))}) {
    for (int i = 0; i < 2000; ++i) {
      const PointPairVector a{oracle::random_point(rng, 3), oracle::random_point(rng, 3)},
          b{oracle::random_point(rng, 3), oracle::random_point(rng, 3)};
      REQUIRE(scalar_product(g, a, b) == scalar_product(g, b, a));
      REQUIRE(scalar_product(g, a, a) == length_squared(g, a));
      REQUIRE(is_equivalent(g, a, a));
    }
  }
}

TEST_CASE("lengths") {
  CHECK(length_squared(make_euclidean(2), {{0, 0}, {3, 4}}) == 25);
  const auto m2 = make_minkowski(2);
  CHECK(length_squared(m2, {{0, 0}, {1, 1}}) == 0);
  CHECK(length_squared(m2, {{0, 0}, {0, 1}}) == -1);
  CHECK(d(proper_length(8)) == doctest::Approx(4));
  CHECK_THROWS_AS(proper_length(-1), IndefiniteError);
}

TEST_CASE("equivalence residual") {
  const auto e2 = make_euclidean(2);
  const PointPairVector a{{0, 0}, {1, 0}};
  auto r = equivalence_residual(e2, a, {{0, 1}, {1, 1}});
  CHECK(r.scalar == 0);
  CHECK(r.length == 0);
  r = equivalence_residual(e2, a, {{0, 0}, {0, 1}});
  CHECK(d(r.scalar) == doctest::Approx(-1));
  CHECK(r.length == 0);
  r = equivalence_residual(e2, a, a);
  CHECK(r.norm() == 0);

  CHECK(is_equivalent(e2, a, {{0, 1}, {1, 1}}, 1e-9));
  CHECK_FALSE(is_equivalent(e2, a, {{0, 0}, {0, 1}}, 1e-9));
  CHECK(is_equivalent(e2, a, a, 1e-9));
  CHECK_THROWS_AS(is_equivalent(e2, a, a, 0), ValidationError);
  CHECK_THROWS_AS(is_equivalent(e2, a, a, -1), ValidationError);
}

TEST_CASE("collinearity and parallelism") {
  const auto e2 = make_euclidean(2);
  const PointPairVector a{{0, 0}, {1, 0}};
  CHECK(collinearity_gram(e2, a, {{0, 0}, {2, 0}}) == 0);
  CHECK(d(collinearity_gram(e2, a, {{0, 0}, {0, 1}})) == doctest::Approx(1));
  CHECK(collinearity_gram(e2, a, a) == 0);
  CHECK_THROWS_AS(collinearity_gram(e2, a, {{1, 0}, {2, 0}}), DegenerateError);
  CHECK(pair_gram(e2, a, {{1, 0}, {3, 0}}) == 0);

  CHECK(d(parallelism_residual(e2, a, {{0, 0}, {2, 0}})) == doctest::Approx(0).epsilon(1e-15));
  CHECK(d(parallelism_residual(e2, a, {{0, 0}, {-1, 0}})) == doctest::Approx(-2));
  CHECK(d(parallelism_residual(e2, a, a)) == doctest::Approx(0));
  CHECK_THROWS_AS(parallelism_residual(make_minkowski(2), {{0, 0}, {0, 1}}, {{0, 0}, {1, 0}}),
                  IndefiniteError);
}

TEST_CASE("gram determinant") {
  const auto e3 = make_euclidean(3), e2 = make_euclidean(2);
  CHECK(d(gram_determinant(e3, {0, 0, 0}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) == doctest::Approx(1));
  CHECK(d(gram_determinant(e3, {0, 0, 0}, {{1, 2, 0}, {1, 2, 0}})) == doctest::Approx(0));
  CHECK(d(gram_determinant(e2, {0, 0}, {{1, 0}, {1, 1}})) == doctest::Approx(1));
  // Gram of random vectors equals det(AᵀA) computed from coordinates.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const Point o = oracle::random_point(rng, 3);
    std::vector<Point> tips{oracle::random_point(rng, 3), oracle::random_point(rng, 3)};
    const auto u = oracle::diff(oracle::coords(tips[0]), oracle::coords(o));
    const auto v = oracle::diff(oracle::coords(tips[1]), oracle::coords(o));
    const double ref = oracle::dot(u, u) * oracle::dot(v, v) - oracle::dot(u, v) * oracle::dot(u, v);
    CHECK(d(gram_determinant(e3, o, tips)) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("covariant coordinates and basis equality") {
  const auto e2 = make_euclidean(2);
  const Point o{0, 0};
  const std::vector<Point> ortho{{1, 0}, {0, 1}}, skew{{1, 0}, {1, 1}};
  auto x = covariant_coordinates(e2, o, ortho, {{0, 0}, {2, 3}});
  CHECK(d(x[0]) == doctest::Approx(2));
  CHECK(d(x[1]) == doctest::Approx(3));
  x = covariant_coordinates(e2, o, ortho, {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(x[0] == 0);
  CHECK(x[1] == 0);
  x = covariant_coordinates(e2, o, skew, {{0, 0}, {1, 0}});
  CHECK(d(x[0]) == doctest::Approx(1));
  CHECK(d(x[1]) == doctest::Approx(1));
  CHECK_THROWS_AS(covariant_coordinates(e2, o, {{1, 0}, {2, 0}}, {{0, 0}, {1, 1}}), DegenerateError);

  auto r = basis_equality_residual(e2, o, skew, {{0, 0}, {1, 2}}, {{3, -1}, {4, 1}});
  CHECK(d(r[0]) == doctest::Approx(0).epsilon(1e-14));
  CHECK(d(r[1]) == doctest::Approx(0).epsilon(1e-14));
  r = basis_equality_residual(e2, o, ortho, {{0, 0}, {1, 0}}, {{0, 0}, {0, 1}});
  CHECK(d(r[0]) == doctest::Approx(1));
  CHECK(d(r[1]) == doctest::Approx(-1));

  // In E2 a zero basis residual and a zero equivalence residual agree.
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const PointPairVector a{oracle::random_point(rng, 2), oracle::random_point(rng, 2)};
    const Point q0 = oracle::random_point(rng, 2);
    Coords t = q0.coords();
    for (int k = 0; k < 2; ++k) t[k] += a.tip[k] - a.origin[k];
    const PointPairVector b{q0, Point(t)};
    CHECK(d(equivalence_residual(e2, a, b).norm()) <= 1e-12);
    for (Real v : basis_equality_residual(e2, o, skew, a, b)) CHECK(std::fabs(d(v)) <= 1e-12);
  }
}

TEST_CASE("triangle functions") {
  const auto e1 = make_euclidean(1), e2 = make_euclidean(2);
  CHECK(d(triangle_functions(e1, Point{0.0}, Point{1.0}, Point{2.0}).f3) == doctest::Approx(0).epsilon(1e-15));
  CHECK(d(triangle_functions(e2, {0, 0}, {0, 1}, {2, 0}).f3) ==
        doctest::Approx(1 + std::sqrt(5.0) - 2));
  CHECK(d(triangle_functions(e2, {0, 0}, {0, 0}, {2, 0}).f3) == doctest::Approx(0).epsilon(1e-15));
  CHECK_THROWS_AS(triangle_functions(make_minkowski(2), {0, 0}, {0, 1}, {1, 0}), IndefiniteError);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const Point p0 = oracle::random_point(rng, 3), r = oracle::random_point(rng, 3),
                p1 = oracle::random_point(rng, 3);
    const auto f = triangle_functions(make_euclidean(3), p0, r, p1);
    const double l01 = std::sqrt(2 * oracle::euclid_sigma(oracle::coords(p0), oracle::coords(p1)));
    REQUIRE(f.f3 >= -1e-15);
    REQUIRE(f.f0 >= std::max({f.f1, f.f2, f.f3}));
    CHECK(d(f.f0 - f.f3) == doctest::Approx(2 * l01));
    CHECK(d(f.f1 + f.f2) == doctest::Approx(2 * l01));
  }
}

TEST_CASE("factorization identity") {
  const auto e2 = make_euclidean(2);
  auto c = factorization_identity_check(e2, {0, 0}, {1, 0}, {2, 0});
  CHECK(std::fabs(d(c.lhs)) <= 1e-14);
  CHECK(std::fabs(d(c.rhs)) <= 1e-14);
  c = factorization_identity_check(e2, {0, 0}, {0, 0}, {2, 0});
  CHECK(c.lhs == 0);
  CHECK(std::fabs(d(c.rhs)) <= 1e-14);

  // brute force: P0=(0,0), R=(0,1), P1=(2,0); (a.b) = 0, |b|² = 1, |a|² = 4
  c = factorization_identity_check(e2, {0, 0}, {0, 1}, {2, 0});
  const double l1 = 1, l2 = std::sqrt(5.0), l3 = 2;
  const double rhs = (l1 + l2 + l3) * (-l1 + l2 + l3) * (l1 - l2 + l3) * (l1 + l2 - l3) / 4;
  CHECK(d(c.lhs) == doctest::Approx(-4));
  CHECK(std::fabs(std::fabs(d(c.lhs)) - std::fabs(rhs)) <= 1e-12);
  // The sign relation is lhs = −rhs (regression guard).
  CHECK(d(c.lhs + c.rhs) == doctest::Approx(0).epsilon(1e-12));

  std::mt19937_64 rng(2);
  const auto sphere = make_sphere_analytic(1.0);
  for (int i = 0; i < 1000; ++i) {
    const Point p0 = oracle::random_point(rng, 2), r = oracle::random_point(rng, 2),
                p1 = oracle::random_point(rng, 2);
    const auto f = factorization_identity_check(e2, p0, r, p1);
    REQUIRE(std::fabs(std::fabs(d(f.lhs)) - std::fabs(d(f.rhs))) <= 1e-10);
    REQUIRE(d(f.lhs + f.rhs) == doctest::Approx(0).epsilon(1e-10).scale(1));
    const Point s0 = oracle::random_point(rng, 2, 0.3, 2.8), s1 = oracle::random_point(rng, 2, 0.3, 2.8),
                s2 = oracle::random_point(rng, 2, 0.3, 2.8);
    const auto fs = factorization_identity_check(sphere, s0, s1, s2);
    REQUIRE(std::fabs(std::fabs(d(fs.lhs)) - std::fabs(d(fs.rhs))) <= 1e-10);
  }
}

TEST_CASE("triangle area") {
  const auto e2 = make_euclidean(2), e3 = make_euclidean(3);
  CHECK(d(triangle_area(e2, {0, 0}, {1, 0}, {0, 1})) == doctest::Approx(0.5));
  CHECK(d(triangle_area(e2, {0, 0}, {1, 1}, {2, 2})) == doctest::Approx(0).epsilon(1e-12));
  CHECK(d(triangle_area(e3, {0, 0, 0}, {2, 0, 0}, {0, 3, 0})) == doctest::Approx(3));
  CHECK_THROWS_AS(triangle_area(make_minkowski(2), {0, 0}, {1, 0.2}, {0.2, 1}), IndefiniteError);

  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    const Point a = oracle::random_point(rng, 3), b = oracle::random_point(rng, 3),
                c = oracle::random_point(rng, 3);
    CHECK(std::fabs(d(triangle_area(e3, a, b, c) - triangle_area_heron(e3, a, b, c))) <= 1e-10);
  }
  CHECK(d(triangle_area_heron(e3, {0, 0, 0}, {2, 0, 0}, {0, 3, 0})) == doctest::Approx(3));
}
