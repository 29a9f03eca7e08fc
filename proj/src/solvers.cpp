#include "worldfn/solvers.hpp"

#include "worldfn/algebra.hpp"
#include "worldfn/spatial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace worldfn {

using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

Real residual_norm(const ResidualVector& r) {
  Real s = 0;
  for (Real v : r) s += v * v;
  return std::sqrt(s);
}

bool SolutionSet::has_continuum() const {
  return std::any_of(clusters.begin(), clusters.end(),
                     [](const Cluster& c) { return c.local_dimension > 0; });
}

int SolutionSet::max_dimension() const {
  int d = 0;
  for (const auto& c : clusters) d = std::max(d, c.local_dimension);
  return d;
}

namespace {

bool finite(const ResidualVector& r) {
  for (Real v : r)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return !r.empty();
}

std::optional<ResidualVector> try_eval(const Residual& r, const Point& p) {
  try {
    auto v = r(p);
    if (finite(v)) return v;
  } catch (const Error&) {
  }
  return std::nullopt;
}

void validate_region(const Box& region, double tol) {
  region.validate();
  if (!(tol > 0)) throw ValidationError("tolerance must be positive");
}

}  // namespace

constexpr std::size_t kPolishSteps = 24;

RefineResult refine_to_zero(const Residual& r, const Point& seed, double step, double tol,
                            const RefineOptions& options) {
  RefineResult out{seed, 0, false, 0};
  auto r0 = try_eval(r, seed);
  if (!r0) return out;
  ResidualVector rx = *r0;
  Real nx = residual_norm(rx);
  Point x = seed;
  const std::size_t n = seed.arity();
  const std::size_t m = rx.size();
  Real best = nx;
  std::size_t polish = 0;

  for (std::size_t it = 0; it < options.max_iterations && nx > 0; ++it) {
    out.iterations = it + 1;
    MatrixR jac(m, n);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      Point xp = x, xm = x;
      xp.coords()[j] += step;
      xm.coords()[j] -= step;
      auto rp = try_eval(r, xp);
      auto rm = try_eval(r, xm);
      if (!rp || !rm || rp->size() != m || rm->size() != m) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < m; ++i) jac(i, j) = ((*rp)[i] - (*rm)[i]) / (2 * Real(step));
    }
    if (!ok) break;
    VectorR b(m);
    for (std::size_t i = 0; i < m; ++i) b(i) = rx[i];
    const VectorR delta = jac.completeOrthogonalDecomposition().solve(b);
    if (!delta.allFinite() || delta.norm() == 0) break;

    Real lambda = 1;
    bool accepted = false;
    if (nx <= tol && polish < kPolishSteps) {
      // Converged but the norm sits on its rounding floor (the linear part of
      // a double-root system). Full steps still shrink the quadratic part.
      Point xn = x;
      for (std::size_t j = 0; j < n; ++j) xn.coords()[j] = static_cast<double>(x[j] - delta(j));
      auto rn = xn == x ? std::nullopt : try_eval(r, xn);
      if (rn && rn->size() == m) {
        const Real nn = residual_norm(*rn);
        if (nn <= tol) {
          x = std::move(xn);
          rx = std::move(*rn);
          nx = nn;
          best = std::min(best, nn);
          ++polish;
          continue;
        }
      }
    }
    for (std::size_t h = 0; h <= options.max_halvings; ++h, lambda /= 2) {
      Point xn = x;
      for (std::size_t j = 0; j < n; ++j)
        xn.coords()[j] = static_cast<double>(x[j] - lambda * delta(j));
      if (xn == x) break;
      auto rn = try_eval(r, xn);
      if (!rn || rn->size() != m) continue;
      const Real nn = residual_norm(*rn);
      if (nn < nx) {
        x = std::move(xn);
        rx = std::move(*rn);
        nx = nn;
        best = std::min(best, nn);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.point = std::move(x);
  out.residual = nx;
  out.converged = nx <= tol;
  return out;
}

std::vector<Point> grid_points(const Box& region, std::size_t points_per_axis) {
  region.validate();
  if (points_per_axis < 2) throw ValidationError("grid needs at least 2 points per axis");
  const std::size_t n = region.dimension();
  double total = std::pow(static_cast<double>(points_per_axis), static_cast<double>(n));
  if (total > 5e7) throw ValidationError("grid too large: " + std::to_string(total) + " vertices");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    Coords c(n);
    for (std::size_t a = 0; a < n; ++a)
      c[a] = region.lower[a] +
             (region.upper[a] - region.lower[a]) * static_cast<double>(idx[a]) /
                 static_cast<double>(points_per_axis - 1);
    out.emplace_back(std::move(c));
    std::size_t a = n;
    while (a > 0) {
      --a;
      if (++idx[a] < points_per_axis) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

int pca_dimension(const std::vector<Point>& cloud, double gap) {
  if (cloud.size() < 2) return 0;
  const std::size_t n = cloud.front().arity();
  Eigen::MatrixXd m(cloud.size(), n);
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(n);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = cloud[i][j];
      mean(j) += cloud[i][j];
    }
  mean /= static_cast<double>(cloud.size());
  m.rowwise() -= mean;
  const Eigen::VectorXd s = m.jacobiSvd().singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  for (Eigen::Index d = 1; d <= s.size(); ++d) {
    const double next = d < s.size() ? s(d) : 0.0;
    if (next * gap <= s(d - 1)) return static_cast<int>(d);
  }
  return static_cast<int>(s.size());
}

SolutionSet assemble_solution_set(std::vector<Point> points, const Residual& r, const Box& region,
                                  double resolution, const SolveOptions& options) {
  SolutionSet out;
  out.searched_region = region;
  out.tolerance = options.tolerance;
  out.resolution = resolution;
  out.cluster_radius = options.merge_radius > 0
                           ? options.merge_radius
                           : std::max(3 * options.tolerance, 1e-4 * resolution);
  out.link_radius = options.link_factor * resolution;

  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Greedy dedup in lexicographic order. Each neighbourhood keeps the member
  // closest to its mean, since refined points scatter around a double root.
  {
    PointIndex index(points);
    std::vector<char> removed(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (removed[i]) continue;
      std::vector<std::size_t> group;
      for (std::size_t j : index.within(points[i], out.cluster_radius))
        if (!removed[j]) group.push_back(j);
      const std::size_t n = points[i].arity();
      std::vector<long double> mean(n, 0);
      for (std::size_t j : group)
        for (std::size_t k = 0; k < n; ++k) mean[k] += points[j][k];
      std::size_t keep = i;
      long double best = -1;
      for (std::size_t j : group) {
        long double d = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const long double t = points[j][k] - mean[k] / group.size();
          d += t * t;
        }
        if (best < 0 || d < best) best = d, keep = j;
      }
      out.representatives.push_back(points[keep]);
      for (std::size_t j : group) removed[j] = 1;
    }
  }

  const std::size_t count = out.representatives.size();
  out.residual_norms.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto v = try_eval(r, out.representatives[i]);
    out.residual_norms[i] = v ? static_cast<double>(residual_norm(*v))
                              : std::numeric_limits<double>::infinity();
  }
  if (count == 0) return out;

  // Single-linkage clusters.
  PointIndex index(out.representatives);
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j : index.within(out.representatives[i], out.link_radius)) {
      const std::size_t a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  out.cluster_of.assign(count, 0);
  std::vector<std::size_t> root_to_cluster(count, SIZE_MAX);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t root = find(i);
    if (root_to_cluster[root] == SIZE_MAX) {
      root_to_cluster[root] = out.clusters.size();
      out.clusters.push_back(Cluster{{}, 0, i});
    }
    out.cluster_of[i] = root_to_cluster[root];
    out.clusters[out.cluster_of[i]].members.push_back(i);
  }

  const std::size_t k = options.classify.neighbours;
  for (auto& c : out.clusters) {
    if (c.members.size() == 1) continue;
    std::vector<Point> pts;
    pts.reserve(c.members.size());
    for (std::size_t i : c.members) pts.push_back(out.representatives[i]);
    double diameter = 0;
    for (const auto& p : pts) diameter = std::max(diameter, 2 * distance(p, pts.front()));
    if (diameter <= std::max(out.link_radius, 10 * out.cluster_radius)) continue;
    if (pts.size() <= k) {
      c.local_dimension = std::max(1, pca_dimension(pts, options.classify.gap));
      continue;
    }
    PointIndex local(pts);
    std::vector<int> dims;
    dims.reserve(pts.size());
    for (const auto& p : pts) {
      std::vector<Point> nb;
      for (std::size_t j : local.knn(p, k + 1)) nb.push_back(pts[j]);
      dims.push_back(pca_dimension(nb, options.classify.gap));
    }
    std::nth_element(dims.begin(), dims.begin() + dims.size() / 2, dims.end());
    c.local_dimension = std::max(1, dims[dims.size() / 2]);
  }
  return out;
}

SolutionSet solve_from_seeds(const Residual& r, const std::vector<Point>& seeds, const Box& region,
                             double resolution, const SolveOptions& options) {
  validate_region(region, options.tolerance);
  const double step = options.refine.jacobian_step * region.extent();
  const double slack = 1e-9 * region.extent();
  std::vector<std::optional<Point>> refined(seeds.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seeds.size()); ++i) {
    auto res = refine_to_zero(r, seeds[i], step, options.tolerance, options.refine);
    if (res.converged && region.contains(res.point, slack) &&
        (!options.accept || options.accept(res.point)))
      refined[i] = std::move(res.point);
  }
  std::vector<Point> pts;
  for (auto& p : refined)
    if (p) pts.push_back(std::move(*p));
  auto out = assemble_solution_set(std::move(pts), r, region, resolution, options);
  out.candidates = seeds.size();
  return out;
}

SolutionSet solve_scalar_zero_set(const Residual& r, const Box& region,
                                  const SolveOptions& options) {
  validate_region(region, options.tolerance);
  const std::size_t per_axis = options.grid.points_per_axis;
  const auto vertices = grid_points(region, per_axis);
  const std::size_t n = region.dimension();
  double resolution = 0;
  for (std::size_t a = 0; a < n; ++a)
    resolution = std::max(resolution, (region.upper[a] - region.lower[a]) / double(per_axis - 1));

  std::vector<std::optional<ResidualVector>> values(vertices.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(vertices.size()); ++i) {
    if (options.grid.mask && !options.grid.mask(vertices[i])) continue;
    values[i] = try_eval(r, vertices[i]);
  }

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t a = n - 1; a > 0; --a) stride[a - 1] = stride[a] * per_axis;
  const double c = options.candidate_factor > 0 ? options.candidate_factor : 1.0 + n / 2.0;

  std::vector<Point> seeds;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!values[i]) continue;
    const auto& v = *values[i];
    bool candidate = true;
    for (std::size_t comp = 0; comp < v.size() && candidate; ++comp) {
      Real max_diff = 0;
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t coord = (i / stride[a]) % per_axis;
        for (int dir : {-1, 1}) {
          if ((dir < 0 && coord == 0) || (dir > 0 && coord + 1 == per_axis)) continue;
          const std::size_t j = dir < 0 ? i - stride[a] : i + stride[a];
          if (!values[j] || values[j]->size() != v.size()) continue;
          max_diff = std::max(max_diff, std::fabs((*values[j])[comp] - v[comp]));
        }
      }
      if (!(std::fabs(v[comp]) <= c * max_diff || std::fabs(v[comp]) <= options.tolerance))
        candidate = false;
    }
    if (candidate) seeds.push_back(vertices[i]);
  }
  return solve_from_seeds(r, seeds, region, resolution, options);
}

SolutionSet solve_equivalence(const WorldFunction& g, const PointPairVector& a, const Point& q0,
                              const Box& region, const SolveOptions& options) {
  const Domain& dom = g.domain();
  dom.check(a.origin);
  dom.check(a.tip);
  dom.check(q0);
  if (!(options.tolerance > 0)) throw ValidationError("tolerance must be positive");

  Residual r = [g, a, q0](const Point& q1) -> ResidualVector {
    const auto e = equivalence_residual(g, a, {q0, q1});
    return {e.scalar, e.length};
  };

  if (dom.is_discrete()) {
    SolutionSet out;
    out.tolerance = options.tolerance;
    for (std::size_t id = 0; id < dom.point_count; ++id) {
      const Point q1 = Point::discrete(id);
      const Real norm = residual_norm(r(q1));
      if (norm <= options.tolerance) {
        out.clusters.push_back(Cluster{{out.representatives.size()}, 0, out.representatives.size()});
        out.cluster_of.push_back(out.representatives.size());
        out.representatives.push_back(q1);
        out.residual_norms.push_back(static_cast<double>(norm));
      }
    }
    out.candidates = dom.point_count;
    return out;
  }
  if (region.dimension() != dom.dimension)
    throw ValidationError("search region arity does not match the geometry");
  return solve_scalar_zero_set(r, region, options);
}

MultivarianceReport summarize(const SolutionSet& s) {
  MultivarianceReport rep;
  rep.count = s.count();
  for (const auto& c : s.clusters) rep.dimensions.push_back(c.local_dimension);
  rep.continuum = s.has_continuum();
  rep.is_single_variant = rep.count == 1 && rep.dimensions[0] == 0;
  return rep;
}

MultivarianceReport multivariance_report(const WorldFunction& g, const PointPairVector& a,
                                         const Point& q0, const Box& region,
                                         const SolveOptions& options) {
  return summarize(solve_equivalence(g, a, q0, region, options));
}

}  // namespace worldfn
