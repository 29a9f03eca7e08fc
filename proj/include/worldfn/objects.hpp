#pragma once

// Geometrical objects defined implicitly through σ, extracted as sampled
// point sets, and set-level comparison.

#include "worldfn/solvers.hpp"

#include <string>
#include <vector>

namespace worldfn {

struct SamplingSpec {
  Box region;
  std::size_t points_per_axis = 33;
  double tolerance = 1e-9;
  std::function<bool(const Point&)> mask;  // restricts seeding vertices only
  bool densify = true;                     // fill gaps of one-dimensional sets
  std::size_t densify_limit = 4000;        // skip gap filling above this size
};

struct SampledPointSet {
  std::vector<Point> points;      // sorted lexicographically
  std::vector<double> residuals;  // |defining residual| per point
  double tolerance = 0;           // membership bound on the residual
  // Covering radius of the sampling in chart coordinates: every part of the
  // object near a sample lies within this distance of some sample.
  double resolution = 0;
  int local_dimension = 0;
  std::string generator;
  Residual residual;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  // Largest residual magnitude found by re-evaluating every point.
  double recheck() const;
};

SampledPointSet segment_by_triangle(const WorldFunction& g, const Point& p0, const Point& p1,
                                    const SamplingSpec& spec);
SampledPointSet segment_by_parallelism(const WorldFunction& g, const Point& p0, const Point& p1,
                                       const SamplingSpec& spec);
SampledPointSet straight_first_kind(const WorldFunction& g, const Point& p0, const Point& p1,
                                    const SamplingSpec& spec);
SampledPointSet straight_second_kind(const WorldFunction& g, const Point& p0, const Point& p1,
                                     const Point& q0, const SamplingSpec& spec);
SampledPointSet cylinder(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q,
                         const SamplingSpec& spec);

// Grid vertices R with F3(P0, R, P1) < −tol: the interior of the triangle-axiom
// violation region. Vertices where F3 is undefined (σ < 0) are skipped.
std::vector<Point> triangle_axiom_violations(const WorldFunction& g, const Point& p0,
                                             const Point& p1, const SamplingSpec& spec);

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

struct Coincidence {
  double hausdorff = 0;
  bool coincide = false;
  double threshold = 0;  // A.resolution + B.resolution
};

// Symmetric Hausdorff distance in chart coordinates; coincide when it does
// not exceed the combined sampling resolution. Throws ValidationError when a
// set is empty.
Coincidence set_coincidence(const SampledPointSet& a, const SampledPointSet& b);

// Radial shell around the line through p0 and p1 (continuous charts only).
std::function<bool(const Point&)> radial_shell(const Point& p0, const Point& p1, double inner,
                                               double outer);

}  // namespace worldfn
