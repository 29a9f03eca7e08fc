#include "worldfn/algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace worldfn {

using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

Real EquivalenceResidual::norm() const { return std::hypot(scalar, length); }

Real proper_length(Real sigma) {
  if (sigma < 0) throw IndefiniteError("σ < 0: length is not real");
  return std::sqrt(2 * sigma);
}

Real scalar_product(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b) {
  return g(a.origin, b.tip) + g(a.tip, b.origin) - g(a.origin, b.origin) - g(a.tip, b.tip);
}

Real length_squared(const WorldFunction& g, const PointPairVector& a) {
  return 2 * g(a.origin, a.tip);
}

EquivalenceResidual equivalence_residual(const WorldFunction& g, const PointPairVector& a,
                                         const PointPairVector& b) {
  const Real sa = g(a.origin, a.tip);
  return {scalar_product(g, a, b) - 2 * sa, sa - g(b.origin, b.tip)};
}

bool is_equivalent(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b,
                   Real tol) {
  if (!(tol > 0)) throw ValidationError("tolerance must be positive");
  const auto r = equivalence_residual(g, a, b);
  return std::fabs(r.scalar) <= tol && std::fabs(r.length) <= tol;
}

Real pair_gram(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b) {
  const Real ab = scalar_product(g, a, b);
  return length_squared(g, a) * length_squared(g, b) - ab * ab;
}

Real collinearity_gram(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b) {
  if (!(a.origin == b.origin))
    throw DegenerateError("collinearity_gram needs vectors with a common origin");
  return pair_gram(g, a, b);
}

Real parallelism_residual(const WorldFunction& g, const PointPairVector& a,
                          const PointPairVector& b) {
  const Real aa = length_squared(g, a);
  const Real bb = length_squared(g, b);
  if (aa < 0 || bb < 0)
    throw IndefiniteError("parallelism needs non-negative squared lengths; use collinearity_gram");
  return scalar_product(g, a, b) - std::sqrt(aa) * std::sqrt(bb);
}

namespace {

MatrixR gram_matrix(const WorldFunction& g, const Point& origin, const std::vector<Point>& tips) {
  const auto k = static_cast<Eigen::Index>(tips.size());
  MatrixR m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      m(i, j) = scalar_product(g, {origin, tips[i]}, {origin, tips[j]});
      m(j, i) = m(i, j);
    }
  return m;
}

void check_basis(const WorldFunction& g, const Point& origin, const std::vector<Point>& tips,
                 Real degenerate_tol) {
  if (tips.empty()) throw ValidationError("basis is empty");
  const MatrixR m = gram_matrix(g, origin, tips);
  Real scale = 1;
  for (Eigen::Index i = 0; i < m.rows(); ++i) scale *= std::fabs(m(i, i));
  const Real det = m.fullPivLu().determinant();
  if (!(std::fabs(det) > degenerate_tol * scale) || scale == 0)
    throw DegenerateError("basis is degenerate: Gram determinant " +
                          std::to_string(static_cast<double>(det)));
}

}  // namespace

Real gram_determinant(const WorldFunction& g, const Point& origin, const std::vector<Point>& tips) {
  if (tips.empty()) throw ValidationError("gram_determinant needs at least one tip");
  return gram_matrix(g, origin, tips).fullPivLu().determinant();
}

std::vector<Real> covariant_coordinates(const WorldFunction& g, const Point& origin,
                                        const std::vector<Point>& basis_tips,
                                        const PointPairVector& v, Real degenerate_tol) {
  check_basis(g, origin, basis_tips, degenerate_tol);
  std::vector<Real> x;
  x.reserve(basis_tips.size());
  for (const auto& t : basis_tips) x.push_back(scalar_product(g, v, {origin, t}));
  return x;
}

std::vector<Real> basis_equality_residual(const WorldFunction& g, const Point& origin,
                                          const std::vector<Point>& basis_tips,
                                          const PointPairVector& a, const PointPairVector& b,
                                          Real degenerate_tol) {
  auto xa = covariant_coordinates(g, origin, basis_tips, a, degenerate_tol);
  const auto xb = covariant_coordinates(g, origin, basis_tips, b, degenerate_tol);
  for (std::size_t k = 0; k < xa.size(); ++k) xa[k] -= xb[k];
  return xa;
}

TriangleFunctions triangle_functions(const WorldFunction& g, const Point& p0, const Point& r,
                                     const Point& p1) {
  const Real s0r = g(p0, r), sr1 = g(r, p1), s01 = g(p0, p1);
  if (s0r < 0 || sr1 < 0 || s01 < 0)
    throw IndefiniteError("triangle functions need σ ≥ 0 on all three sides");
  const Real a = std::sqrt(2 * s0r), b = std::sqrt(2 * sr1), c = std::sqrt(2 * s01);
  return {a + b + c, -a + b + c, a - b + c, a + b - c};
}

FactorizationCheck factorization_identity_check(const WorldFunction& g, const Point& p0,
                                                const Point& r, const Point& p1) {
  const auto f = triangle_functions(g, p0, r, p1);
  const PointPairVector a{p0, p1}, q{p0, r};
  const Real aq = scalar_product(g, a, q);
  return {aq * aq - length_squared(g, q) * length_squared(g, a), f.f0 * f.f1 * f.f2 * f.f3 / 4};
}

Real triangle_area(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q) {
  const Real det = pair_gram(g, {p0, p1}, {p0, q});
  if (det < 0) {
    // Rounding can push an exactly degenerate triangle slightly negative.
    const Real scale = std::fabs(length_squared(g, {p0, p1}) * length_squared(g, {p0, q}));
    if (-det <= 64 * std::numeric_limits<Real>::epsilon() * scale) return 0;
    throw IndefiniteError("triangle area: negative Gram determinant");
  }
  return std::sqrt(det) / 2;
}

Real triangle_area_heron(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q) {
  std::array<Real, 3> s{proper_length(g(p0, p1)), proper_length(g(p1, q)), proper_length(g(p0, q))};
  std::sort(s.begin(), s.end(), std::greater<>());
  const Real a = s[0], b = s[1], c = s[2];
  const Real prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (prod < 0) {
    if (-prod <= 64 * std::numeric_limits<Real>::epsilon() * a * a * a * a) return 0;
    throw IndefiniteError("Hero's formula: sides violate the triangle inequality");
  }
  return std::sqrt(prod) / 4;
}

}  // namespace worldfn
