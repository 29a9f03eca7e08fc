#pragma once

// Riemannian construction: metric fields, Christoffel symbols, geodesics, the
// induced world function σ_R = ½L², conventional parallel transport, the
// world-function parallelism condition and the collinearity cone.

#include "worldfn/core.hpp"
#include "worldfn/solvers.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace worldfn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class MetricSource { explicit_metric, induced_from_embedding };

class MetricField {
 public:
  using MetricFn = std::function<Mat(const Vec&)>;
  using EmbeddingFn = std::function<Vec(const Vec&)>;

  static MetricField explicit_metric(std::size_t n, MetricFn g, Box chart);
  // g_ik = Σ_l ∂X^l/∂ξ^i ∂X^l/∂ξ^k with a fourth-order difference Jacobian.
  static MetricField from_embedding(std::size_t n, EmbeddingFn x, Box chart,
                                    double step = 1e-3);
  static MetricField flat(std::size_t n, Box chart);
  // Chart (θ, φ), g = diag(R², R² sin²θ), with the embedding attached.
  static MetricField sphere(double radius, std::optional<Box> chart = std::nullopt);
  // Same sphere, metric induced from the embedding.
  static MetricField sphere_embedded(double radius, std::optional<Box> chart = std::nullopt);

  Mat metric(const Vec& x) const;
  bool has_embedding() const { return static_cast<bool>(embedding_); }
  Vec embed(const Vec& x) const;
  Mat embedding_jacobian(const Vec& x) const;

  std::size_t dimension() const { return n_; }
  MetricSource source() const { return source_; }
  const Box& chart() const { return chart_; }
  bool in_chart(const Vec& x) const;

  // Symmetry and positive definiteness on random chart samples; throws
  // ValidationError.
  void validate(std::size_t samples = 64, std::uint64_t seed = 11) const;

 private:
  std::size_t n_ = 0;
  MetricSource source_ = MetricSource::explicit_metric;
  MetricFn metric_;
  EmbeddingFn embedding_;
  double embed_step_ = 1e-3;
  Box chart_;
};

Box default_sphere_chart();

struct Christoffel {
  std::size_t n = 0;
  Mat g, g_inv;
  std::vector<double> second;   // γ^k_ls at [(k·n + l)·n + s]
  std::vector<double> lowered;  // γ_{j;is} = g_jl γ^l_is at [(j·n + i)·n + s]
  std::vector<double> dg;       // g_{rj,s} = ∂_s g_rj at [(r·n + j)·n + s]

  double gamma(std::size_t k, std::size_t l, std::size_t s) const { return second[(k * n + l) * n + s]; }
  double gamma_lowered(std::size_t j, std::size_t i, std::size_t s) const {
    return lowered[(j * n + i) * n + s];
  }
  double metric_derivative(std::size_t r, std::size_t j, std::size_t s) const {
    return dg[(r * n + j) * n + s];
  }
  // Γ(a, b)^k = γ^k_ls a^l b^s.
  Vec contract(const Vec& a, const Vec& b) const;
};

// Central differences with step h. DegenerateError on a singular metric.
Christoffel christoffel(const MetricField& mf, const Vec& x, double h = 1e-5);

struct Path {
  std::vector<double> tau;
  std::vector<Vec> points;
  std::vector<Vec> velocities;

  std::size_t size() const { return points.size(); }
  double length(const MetricField& mf) const;
  double speed(const MetricField& mf, std::size_t i) const;
};

// RK4 on ẍ^k + γ^k_ls ẋ^l ẋ^s = 0. DomainError when the path leaves the chart.
Path geodesic_ivp(const MetricField& mf, const Vec& x0, const Vec& v0, double tau_end,
                  std::size_t steps);

struct BvpOptions {
  std::size_t steps = 200;
  double tolerance = 1e-11;  // endpoint mismatch, chart units
  std::size_t max_iterations = 40;
  std::size_t restarts = 8;
};

// Shooting over τ ∈ [0, 1]; Newton on the initial velocity, straight-line
// initial guess, then perturbed restarts. ConvergenceError on failure.
Path geodesic_bvp(const MetricField& mf, const Vec& xa, const Vec& xb, const BvpOptions& opt = {});

// ½L² of the connecting geodesic.
Real world_function_riemann(const MetricField& mf, const Vec& xa, const Vec& xb,
                            const BvpOptions& opt = {});

// σ_R as a WorldFunction over the chart; BVP results are memoized and the
// cache is safe for concurrent use.
WorldFunction make_riemannian(const MetricField& mf, const BvpOptions& opt = {});

// ½R²ψ² with ψ the angle between embedded points, chart (θ, φ).
WorldFunction make_sphere_analytic(double radius, std::optional<Box> chart = std::nullopt);

Vec to_vec(const Point& p);
Point to_point(const Vec& v);

// σ_{i,l′} = ∂²σ/∂x^i∂x′^l by central differences.
Mat sigma_mixed_derivatives(const WorldFunction& wf, const Vec& x, const Vec& xp, double h = 1e-4);

struct TangentVector {
  Vec base;
  Vec components;  // contravariant
};

double norm_squared(const MetricField& mf, const TangentVector& u);

// du^k = −γ^k_ls u^l dx^s integrated with RK4 along the path (Hermite
// interpolation between samples). The path must start at u.base.
TangentVector transport_conventional(const MetricField& mf, const TangentVector& u,
                                     const Path& path);

// Chart-straight path from xa to xb with `steps` segments.
Path straight_path(const Vec& xa, const Vec& xb, std::size_t steps);

// Signed rotation angle from a to b at x (two-dimensional charts).
double rotation_angle(const MetricField& mf, const Vec& x, const Vec& a, const Vec& b);

// Line angle in [0, π/2] between directions a and b at x.
double direction_angle(const MetricField& mf, const Vec& x, const Vec& a, const Vec& b);

// (uᵀSv)² − (uᵀg(x)u)(vᵀg(x′)v) with S = σ_{i,l′}(x, x′).
double parallelism_residual_wf(const WorldFunction& wf, const MetricField& mf,
                               const TangentVector& u, const TangentVector& v, double h = 1e-4);

// First-order expansion of the parallelism condition at x′ = x + dξ for
// v + δv, dots taken with g(x):
//   (u·v)² − |u|²|v|² + 2(u·v) γ_{i;lb} u^i v^l dξ^b − |u|² g_{ls,b} v^l v^s dξ^b
//   + 2(u·v)(u·δv) − 2|u|²(v·δv).
double linearized_parallelism_residual(const MetricField& mf, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& dv, const Vec& dxi);
double linearized_parallelism_residual(const Christoffel& c, const Vec& u, const Vec& v,
                                       const Vec& dv, const Vec& dxi);

// One step of the conventional rule: u − Γ(u, dξ).
Vec conventional_step(const MetricField& mf, const Vec& x, const Vec& u, const Vec& dxi);

// Transport u0 along the closed geodesic polygon through `loop` (first vertex
// repeated implicitly) and return the signed rotation angle at the start.
double holonomy_angle(const MetricField& mf, const std::vector<Vec>& loop, const Vec& u0,
                      const BvpOptions& opt = {});

// Chart point (θ, φ) of a unit-sphere direction.
Vec sphere_chart_point(const Eigen::Vector3d& e);
// Right-angled octant triangle rotated so its centre sits on the equator at
// φ = 0, away from the chart's polar cut.
std::vector<Vec> rotated_octant_triangle();

// |σ-parallelism residual| of one conventional step from (x, u) along dξ,
// normalized by |u|²|v|².
double conventional_step_residual(const WorldFunction& wf, const MetricField& mf, const Vec& x,
                                  const Vec& u, const Vec& dxi, double h = 1e-4);

enum class ConeModel {
  linearized,  // the first-order form above with v := w, δv := 0
  finite       // parallelism_residual_wf at x + dξ
};

struct ConeOptions {
  ConeModel model = ConeModel::linearized;
  std::size_t samples = 180;
  double tolerance = 1e-12;   // on the residual normalized by |u|²|w|²
  double merge_angle = 1e-3;  // directions closer than this are one direction
  double h = 1e-4;            // finite model: mixed-derivative step
  std::uint64_t seed = 3;     // n ≥ 3: direction seeds
};

struct CollinearityCone {
  SolutionSet directions;          // clustered zero set in direction space
  std::vector<Vec> zero_directions;  // unit (g at x + dξ) direction per representative
  std::vector<Vec> cluster_directions;  // one per cluster (anchor)
  bool degenerate = false;         // exactly one isolated direction
  double aperture = 0;             // largest line angle between zero directions
};

CollinearityCone collinearity_cone(const WorldFunction& wf, const MetricField& mf,
                                   const TangentVector& u, const Vec& dxi,
                                   const ConeOptions& options = {});

}  // namespace worldfn
