#pragma once

// Zero sets of residual systems: grid seeding, Gauss-Newton refinement,
// deduplication, single-linkage clustering and local-dimension classification.

#include "worldfn/core.hpp"

#include <boost/container/small_vector.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace worldfn {

using ResidualVector = boost::container::small_vector<Real, 4>;
// Pure map from a chart point to residual components. May throw; a throwing
// evaluation marks the point as outside the residual's domain.
using Residual = std::function<ResidualVector(const Point&)>;

Real residual_norm(const ResidualVector& r);

struct GridSpec {
  std::size_t points_per_axis = 33;
  // Optional restriction of the seeding vertices (e.g. a radial shell).
  std::function<bool(const Point&)> mask;
};

struct RefineOptions {
  std::size_t max_iterations = 50;
  double jacobian_step = 1e-6;  // relative to region extent
  std::size_t max_halvings = 12;
};

struct ClassifyOptions {
  std::size_t neighbours = 10;  // k for local PCA
  double gap = 10.0;            // singular-value ratio separating kept from dropped
};

struct SolveOptions {
  double tolerance = 1e-9;
  GridSpec grid;
  RefineOptions refine;
  ClassifyOptions classify;
  // Candidate test |rᵢ(v)| ≤ c·max |Δrᵢ| over axis neighbours; 0 selects 1 + n/2.
  double candidate_factor = 0;
  // Overrides for the dedup radius and the single-linkage distance
  // (multiples of the resolution); 0 keeps the defaults.
  double merge_radius = 0;
  double link_factor = 2.5;
  // Refined points must also pass this filter (e.g. a length cap).
  std::function<bool(const Point&)> accept;
};

struct Cluster {
  std::vector<std::size_t> members;  // indices into representatives, ascending
  int local_dimension = 0;           // 0 isolated, ≥1 continuum
  std::size_t anchor = 0;            // lexicographically smallest member
};

struct SolutionSet {
  std::vector<Point> representatives;  // sorted lexicographically
  std::vector<double> residual_norms;
  std::vector<std::size_t> cluster_of;
  std::vector<Cluster> clusters;  // ordered by anchor
  double cluster_radius = 0;      // representatives are farther apart than this
  double link_radius = 0;         // single-linkage distance
  double resolution = 0;          // seeding cell size
  double tolerance = 0;
  Box searched_region;
  std::size_t candidates = 0;  // grid vertices that were refined

  std::size_t count() const { return clusters.size(); }
  bool empty() const { return representatives.empty(); }
  bool has_continuum() const;
  int max_dimension() const;
};

struct RefineResult {
  Point point;
  Real residual = 0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Damped Gauss-Newton with a min-norm pseudo-inverse step and a central
// difference Jacobian. Keeps iterating while the residual decreases so double
// roots are resolved to the square root of working precision.
RefineResult refine_to_zero(const Residual& r, const Point& seed, double step, double tol,
                            const RefineOptions& options = {});

// Grid vertices of `region` (points_per_axis per axis, lexicographic order).
std::vector<Point> grid_points(const Box& region, std::size_t points_per_axis);

SolutionSet solve_scalar_zero_set(const Residual& r, const Box& region,
                                  const SolveOptions& options = {});

// Refine explicit seeds instead of grid candidates; `resolution` sets the
// merge and link radii.
SolutionSet solve_from_seeds(const Residual& r, const std::vector<Point>& seeds,
                             const Box& region, double resolution,
                             const SolveOptions& options = {});

// Dedup, cluster and classify already refined points (sorted copy is taken).
SolutionSet assemble_solution_set(std::vector<Point> points, const Residual& r, const Box& region,
                                  double resolution, const SolveOptions& options);

// Local dimension of a point cloud by PCA with the gap rule.
int pca_dimension(const std::vector<Point>& cloud, double gap = 10.0);

// Q1 with a eqv (Q0, Q1). Discrete geometries are enumerated exhaustively and
// `region` is ignored.
SolutionSet solve_equivalence(const WorldFunction& g, const PointPairVector& a, const Point& q0,
                              const Box& region, const SolveOptions& options = {});

struct MultivarianceReport {
  std::size_t count = 0;
  std::vector<int> dimensions;  // per cluster
  bool is_single_variant = false;
  bool continuum = false;
};

MultivarianceReport summarize(const SolutionSet& s);
MultivarianceReport multivariance_report(const WorldFunction& g, const PointPairVector& a,
                                         const Point& q0, const Box& region,
                                         const SolveOptions& options = {});

}  // namespace worldfn
