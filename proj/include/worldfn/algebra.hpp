#pragma once

// Point-pair algebra expressed through σ alone.

#include "worldfn/core.hpp"

#include <array>
#include <vector>

namespace worldfn {

inline constexpr Real kResidualTolerance = 1e-9;
inline constexpr Real kIdentityTolerance = 1e-10;

// (a.b) = σ(P0,Q1) + σ(P1,Q0) − σ(P0,Q0) − σ(P1,Q1) for a = P0P1, b = Q0Q1.
Real scalar_product(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b);

// 2σ(origin, tip); negative in indefinite geometries.
Real length_squared(const WorldFunction& g, const PointPairVector& a);

struct EquivalenceResidual {
  Real scalar = 0;  // (a.b) − 2σ(a)
  Real length = 0;  // σ(a) − σ(b)
  Real norm() const;
};

EquivalenceResidual equivalence_residual(const WorldFunction& g, const PointPairVector& a,
                                         const PointPairVector& b);
bool is_equivalent(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b,
                   Real tol = kResidualTolerance);

// (a.a)(b.b) − (a.b)² for any two vectors, no shared-origin requirement.
Real pair_gram(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b);

// pair_gram for vectors sharing their origin; throws DegenerateError otherwise.
Real collinearity_gram(const WorldFunction& g, const PointPairVector& a, const PointPairVector& b);

// (a.b) − |a||b|; zero iff a ↑↑ b. IndefiniteError when a squared length is negative.
Real parallelism_residual(const WorldFunction& g, const PointPairVector& a,
                          const PointPairVector& b);

// det M, M_ij = ((origin, tip_i).(origin, tip_j)).
Real gram_determinant(const WorldFunction& g, const Point& origin, const std::vector<Point>& tips);

// x_k = (v.(origin, tip_k)). Throws DegenerateError when |det M| falls below
// `degenerate_tol` times the product of the diagonal magnitudes.
std::vector<Real> covariant_coordinates(const WorldFunction& g, const Point& origin,
                                        const std::vector<Point>& basis_tips,
                                        const PointPairVector& v, Real degenerate_tol = 1e-12);

std::vector<Real> basis_equality_residual(const WorldFunction& g, const Point& origin,
                                          const std::vector<Point>& basis_tips,
                                          const PointPairVector& a, const PointPairVector& b,
                                          Real degenerate_tol = 1e-12);

struct TriangleFunctions {
  Real f0 = 0, f1 = 0, f2 = 0, f3 = 0;
};

// With ρ = √(2σ): F0 = ρ(P0,R) + ρ(R,P1) + ρ(P0,P1), F1 = −ρ(P0,R) + ρ(R,P1) + ρ(P0,P1),
// F2 = ρ(P0,R) − ρ(R,P1) + ρ(P0,P1), F3 = ρ(P0,R) + ρ(R,P1) − ρ(P0,P1).
TriangleFunctions triangle_functions(const WorldFunction& g, const Point& p0, const Point& r,
                                     const Point& p1);

struct FactorizationCheck {
  Real lhs = 0;  // (P0P1.P0R)² − |P0R|²|P0P1|²
  Real rhs = 0;  // ¼ F0 F1 F2 F3
};

FactorizationCheck factorization_identity_check(const WorldFunction& g, const Point& p0,
                                                const Point& r, const Point& p1);

// ½√det of the Gram matrix of (P0P1, P0Q).
Real triangle_area(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q);
// Hero's formula from the three side lengths, sides sorted descending.
Real triangle_area_heron(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q);

// √(2σ); IndefiniteError for σ < 0.
Real proper_length(Real sigma);

}  // namespace worldfn
