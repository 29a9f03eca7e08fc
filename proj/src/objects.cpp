#include "worldfn/objects.hpp"

#include "worldfn/algebra.hpp"
#include "worldfn/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace worldfn {

double SampledPointSet::recheck() const {
  double worst = 0;
  for (const auto& p : points) {
    const auto r = residual(p);
    worst = std::max(worst, static_cast<double>(residual_norm(r)));
  }
  return worst;
}

namespace {

void check_spec(const WorldFunction& g, const SamplingSpec& spec) {
  if (g.domain().is_discrete())
    throw DomainError("point-set extraction needs a continuous geometry");
  if (spec.points_per_axis < 2) throw ValidationError("grid is empty: need at least 2 points per axis");
  if (spec.region.dimension() != g.dimension())
    throw ValidationError("sampling region arity does not match the geometry");
  spec.region.validate();
  if (!(spec.tolerance > 0)) throw ValidationError("tolerance must be positive");
}

// Edges of a Euclidean minimum spanning tree (Prim, O(N²)).
std::vector<std::pair<std::size_t, std::size_t>> spanning_tree(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (n < 2) return edges;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::vector<char> in(n, 0);
  std::size_t cur = 0;
  in[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in[j]) continue;
      const double d = distance(pts[cur], pts[j]);
      if (d < best[j]) {
        best[j] = d;
        from[j] = cur;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in[next] = 1;
    edges.emplace_back(from[next], next);
    cur = next;
  }
  return edges;
}

SampledPointSet extract(const Residual& r, const SamplingSpec& spec, std::string generator,
                        std::function<bool(const Point&)> accept, std::vector<Point> extra) {
  SolveOptions opt;
  opt.tolerance = spec.tolerance;
  opt.grid.points_per_axis = spec.points_per_axis;
  opt.grid.mask = spec.mask;
  opt.accept = accept;
  SolutionSet sol = solve_scalar_zero_set(r, spec.region, opt);

  std::vector<Point> pts = sol.representatives;
  for (auto& p : extra) pts.push_back(std::move(p));
  const double h = sol.resolution;
  const double merge = sol.cluster_radius;
  const double step = opt.refine.jacobian_step * spec.region.extent();
  const double slack = 1e-9 * spec.region.extent();

  SampledPointSet out;
  out.tolerance = spec.tolerance;
  out.generator = std::move(generator);
  out.residual = r;
  out.local_dimension = sol.max_dimension();
  out.resolution = h;

  if (spec.densify && out.local_dimension == 1 && pts.size() <= spec.densify_limit) {
    // Insert refined midpoints of long spanning-tree edges until every edge
    // inside a component is at most h/2.
    const double target = h / 2;
    double longest = 0;
    for (int round = 0; round < 8; ++round) {
      std::sort(pts.begin(), pts.end());
      const auto edges = spanning_tree(pts);
      longest = 0;
      std::vector<Point> seeds;
      for (auto [i, j] : edges) {
        const double d = distance(pts[i], pts[j]);
        if (d > sol.link_radius) continue;  // between components
        longest = std::max(longest, d);
        if (d <= target) continue;
        Coords mid(pts[i].arity());
        for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = (pts[i][k] + pts[j][k]) / 2;
        seeds.emplace_back(std::move(mid));
      }
      if (seeds.empty()) break;
      PointIndex index(pts);
      std::vector<Point> added;
      for (const auto& s : seeds) {
        auto res = refine_to_zero(r, s, step, spec.tolerance, opt.refine);
        if (!res.converged || !spec.region.contains(res.point, slack)) continue;
        if (accept && !accept(res.point)) continue;
        if (index.nearest(res.point).second <= merge) continue;
        added.push_back(std::move(res.point));
      }
      if (added.empty() || pts.size() + added.size() > 4 * spec.densify_limit) break;
      for (auto& p : added) pts.push_back(std::move(p));
    }
    out.resolution = std::max(longest / 2, 1e-3 * h);
  }

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  out.points = std::move(pts);
  out.residuals.reserve(out.points.size());
  for (const auto& p : out.points) out.residuals.push_back(static_cast<double>(residual_norm(r(p))));
  return out;
}

SampledPointSet single_point(const Point& p, const Residual& r, const SamplingSpec& spec,
                             std::string generator) {
  SampledPointSet out;
  out.points = {p};
  out.residuals = {static_cast<double>(residual_norm(r(p)))};
  out.tolerance = spec.tolerance;
  out.generator = std::move(generator);
  out.residual = r;
  out.resolution = 0;
  return out;
}

}  // namespace

SampledPointSet segment_by_triangle(const WorldFunction& g, const Point& p0, const Point& p1,
                                    const SamplingSpec& spec) {
  check_spec(g, spec);
  g.domain().check(p0);
  g.domain().check(p1);
  if (g(p0, p1) < 0) throw IndefiniteError("segment needs σ(P0, P1) ≥ 0");
  Residual r = [g, p0, p1](const Point& x) -> ResidualVector {
    return {triangle_functions(g, p0, x, p1).f3};
  };
  if (p0 == p1) return single_point(p0, r, spec, "F3(P0,R,P1)");
  return extract(r, spec, "F3(P0,R,P1)", nullptr, {p0, p1});
}

SampledPointSet segment_by_parallelism(const WorldFunction& g, const Point& p0, const Point& p1,
                                       const SamplingSpec& spec) {
  check_spec(g, spec);
  g.domain().check(p0);
  g.domain().check(p1);
  const Real cap = length_squared(g, {p0, p1});
  if (cap < 0) throw IndefiniteError("segment needs σ(P0, P1) ≥ 0");
  Residual r = [g, p0, p1](const Point& x) -> ResidualVector {
    return {parallelism_residual(g, {p0, p1}, {p0, x})};
  };
  if (p0 == p1) return single_point(p0, r, spec, "(P0P1.P0R) - |P0P1||P0R|, |P0R| <= |P0P1|");
  const double slack = 1e-9 * (1 + static_cast<double>(cap));
  auto accept = [g, p0, cap, slack](const Point& x) {
    return length_squared(g, {p0, x}) <= cap + slack;
  };
  return extract(r, spec, "(P0P1.P0R) - |P0P1||P0R|, |P0R| <= |P0P1|", accept, {p0, p1});
}

SampledPointSet straight_first_kind(const WorldFunction& g, const Point& p0, const Point& p1,
                                    const SamplingSpec& spec) {
  check_spec(g, spec);
  g.domain().check(p0);
  g.domain().check(p1);
  if (p0 == p1) throw DegenerateError("straight needs P0 != P1");
  Residual r = [g, p0, p1](const Point& x) -> ResidualVector {
    return {collinearity_gram(g, {p0, p1}, {p0, x})};
  };
  return extract(r, spec, "Gram(P0P1, P0R)", nullptr, {p0, p1});
}

SampledPointSet straight_second_kind(const WorldFunction& g, const Point& p0, const Point& p1,
                                     const Point& q0, const SamplingSpec& spec) {
  check_spec(g, spec);
  g.domain().check(p0);
  g.domain().check(p1);
  g.domain().check(q0);
  if (p0 == p1) throw DegenerateError("straight needs P0 != P1");
  Residual r = [g, p0, p1, q0](const Point& x) -> ResidualVector {
    return {pair_gram(g, {p0, p1}, {q0, x})};
  };
  return extract(r, spec, "Gram(P0P1, Q0R)", nullptr, {q0});
}

SampledPointSet cylinder(const WorldFunction& g, const Point& p0, const Point& p1, const Point& q,
                         const SamplingSpec& spec) {
  check_spec(g, spec);
  g.domain().check(p0);
  g.domain().check(p1);
  g.domain().check(q);
  if (p0 == p1) throw DegenerateError("cylinder needs P0 != P1");
  const Real sq = triangle_area(g, p0, p1, q);
  Residual r = [g, p0, p1, sq](const Point& x) -> ResidualVector {
    return {triangle_area(g, p0, p1, x) - sq};
  };
  return extract(r, spec, "S(P0,P1,R) - S(P0,P1,Q)", nullptr, {q});
}

std::vector<Point> triangle_axiom_violations(const WorldFunction& g, const Point& p0,
                                             const Point& p1, const SamplingSpec& spec) {
  check_spec(g, spec);
  std::vector<Point> out;
  for (const auto& v : grid_points(spec.region, spec.points_per_axis)) {
    try {
      if (triangle_functions(g, p0, v, p1).f3 < -spec.tolerance) out.push_back(v);
    } catch (const IndefiniteError&) {
    }
  }
  return out;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw ValidationError("Hausdorff distance of an empty set");
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    PointIndex index(to);
    double worst = 0;
    for (const auto& p : from) worst = std::max(worst, index.nearest(p).second);
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Coincidence set_coincidence(const SampledPointSet& a, const SampledPointSet& b) {
  Coincidence c;
  c.hausdorff = hausdorff_distance(a.points, b.points);
  c.threshold = a.resolution + b.resolution;
  c.coincide = c.hausdorff <= c.threshold;
  return c;
}

std::function<bool(const Point&)> radial_shell(const Point& p0, const Point& p1, double inner,
                                               double outer) {
  const std::size_t n = p0.arity();
  std::vector<double> axis(n);
  double len2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = p1[i] - p0[i];
    len2 += axis[i] * axis[i];
  }
  if (len2 == 0) throw DegenerateError("shell axis needs P0 != P1");
  return [p0, axis, len2, inner, outer](const Point& x) {
    double t = 0;
    for (std::size_t i = 0; i < axis.size(); ++i) t += (x[i] - p0[i]) * axis[i];
    t /= len2;
    double rho2 = 0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const double d = x[i] - p0[i] - t * axis[i];
      rho2 += d * d;
    }
    return rho2 >= inner * inner && rho2 <= outer * outer;
  };
}

}  // namespace worldfn
