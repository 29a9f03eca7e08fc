#include "worldfn/riemann.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <shared_mutex>

namespace worldfn {

namespace {

constexpr double kPi = std::numbers::pi;

void check_arity(const Vec& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.size()) != n)
    throw DomainError(std::string(what) + " has arity " + std::to_string(x.size()) +
                      ", chart has dimension " + std::to_string(n));
}

Box chart_or(std::optional<Box> chart, Box fallback) {
  Box b = chart ? *chart : std::move(fallback);
  b.validate();
  return b;
}

Vec sphere_embedding(double r, const Vec& x) {
  Vec out(3);
  out << r * std::sin(x(0)) * std::cos(x(1)), r * std::sin(x(0)) * std::sin(x(1)),
      r * std::cos(x(0));
  return out;
}

}  // namespace

Vec to_vec(const Point& p) {
  const auto& c = p.coords();
  Vec v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v(i) = c[i];
  return v;
}

Point to_point(const Vec& v) {
  Coords c(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) c[i] = v(i);
  return Point(std::move(c));
}

Box default_sphere_chart() { return Box{{0.05, -4 * kPi}, {kPi - 0.05, 4 * kPi}}; }

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::explicit_metric(std::size_t n, MetricFn g, Box chart) {
  if (n == 0) throw ValidationError("metric dimension must be positive");
  if (!g) throw ValidationError("metric function is empty");
  if (chart.dimension() != n) throw ValidationError("chart arity does not match metric dimension");
  chart.validate();
  MetricField mf;
  mf.n_ = n;
  mf.source_ = MetricSource::explicit_metric;
  mf.metric_ = std::move(g);
  mf.chart_ = std::move(chart);
  return mf;
}

MetricField MetricField::from_embedding(std::size_t n, EmbeddingFn x, Box chart, double step) {
  if (n == 0) throw ValidationError("metric dimension must be positive");
  if (!x) throw ValidationError("embedding is empty");
  if (chart.dimension() != n) throw ValidationError("chart arity does not match metric dimension");
  chart.validate();
  MetricField mf;
  mf.n_ = n;
  mf.source_ = MetricSource::induced_from_embedding;
  mf.embedding_ = std::move(x);
  mf.embed_step_ = step;
  mf.chart_ = std::move(chart);
  const Vec probe = mf.embed(to_vec(Point::from_range(mf.chart_.lower)));
  if (static_cast<std::size_t>(probe.size()) <= n)
    throw ValidationError("embedding space must have more dimensions than the chart");
  return mf;
}

MetricField MetricField::flat(std::size_t n, Box chart) {
  return explicit_metric(n, [n](const Vec&) { return Mat::Identity(n, n); }, std::move(chart));
}

MetricField MetricField::sphere(double radius, std::optional<Box> chart) {
  if (!(radius > 0)) throw ValidationError("sphere radius must be positive");
  auto mf = explicit_metric(
      2,
      [radius](const Vec& x) {
        Mat g = Mat::Zero(2, 2);
        const double s = std::sin(x(0));
        g(0, 0) = radius * radius;
        g(1, 1) = radius * radius * s * s;
        return g;
      },
      chart_or(chart, default_sphere_chart()));
  mf.embedding_ = [radius](const Vec& x) { return sphere_embedding(radius, x); };
  return mf;
}

MetricField MetricField::sphere_embedded(double radius, std::optional<Box> chart) {
  if (!(radius > 0)) throw ValidationError("sphere radius must be positive");
  return from_embedding(
      2, [radius](const Vec& x) { return sphere_embedding(radius, x); },
      chart_or(chart, default_sphere_chart()));
}

Vec MetricField::embed(const Vec& x) const {
  if (!embedding_) throw ValidationError("metric field has no embedding");
  check_arity(x, n_, "chart point");
  return embedding_(x);
}

Mat MetricField::embedding_jacobian(const Vec& x) const {
  const Vec x0 = embed(x);
  Mat jac(x0.size(), n_);
  const double h = embed_step_;
  for (std::size_t i = 0; i < n_; ++i) {
    Vec e = Vec::Zero(n_);
    e(i) = h;
    jac.col(i) = (-embed(x + 2 * e) + 8 * embed(x + e) - 8 * embed(x - e) + embed(x - 2 * e)) /
                 (12 * h);
  }
  return jac;
}

Mat MetricField::metric(const Vec& x) const {
  check_arity(x, n_, "chart point");
  if (source_ == MetricSource::explicit_metric) {
    Mat g = metric_(x);
    if (static_cast<std::size_t>(g.rows()) != n_ || static_cast<std::size_t>(g.cols()) != n_)
      throw ValidationError("metric function returned a matrix of the wrong shape");
    return g;
  }
  const Mat j = embedding_jacobian(x);
  return j.transpose() * j;
}

bool MetricField::in_chart(const Vec& x) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (!(x(i) >= chart_.lower[i] && x(i) <= chart_.upper[i])) return false;
  return true;
}

void MetricField::validate(std::size_t samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    Vec x(n_);
    for (std::size_t i = 0; i < n_; ++i)
      x(i) = std::uniform_real_distribution<double>(chart_.lower[i], chart_.upper[i])(rng);
    const Mat g = metric(x);
    if (!g.allFinite()) throw ValidationError("metric is not finite in the chart");
    if ((g - g.transpose()).norm() > 1e-12 * (1 + g.norm()))
      throw ValidationError("metric is not symmetric in the chart");
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    if (es.eigenvalues().minCoeff() <= 0)
      throw ValidationError("metric is not positive definite in the chart");
  }
}

// ---------------------------------------------------------------------------
// Christoffel symbols

Vec Christoffel::contract(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t s = 0; s < n; ++s) out(k) += gamma(k, l, s) * a(l) * b(s);
  return out;
}

Christoffel christoffel(const MetricField& mf, const Vec& x, double h) {
  const std::size_t n = mf.dimension();
  check_arity(x, n, "chart point");
  Christoffel c;
  c.n = n;
  c.g = mf.metric(x);
  Eigen::FullPivLU<Mat> lu(c.g);
  if (!lu.isInvertible() || std::fabs(lu.determinant()) <= 1e-14 * std::pow(c.g.norm(), double(n)))
    throw DegenerateError("singular metric at x");
  c.g_inv = lu.inverse();

  c.dg.assign(n * n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    Vec e = Vec::Zero(n);
    e(s) = h;
    const Mat d = (mf.metric(x + e) - mf.metric(x - e)) / (2 * h);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < n; ++j) c.dg[(r * n + j) * n + s] = d(r, j);
  }
  c.lowered.assign(n * n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t s = 0; s < n; ++s)
        c.lowered[(j * n + l) * n + s] =
            0.5 * (c.metric_derivative(j, s, l) + c.metric_derivative(l, j, s) -
                   c.metric_derivative(l, s, j));
  c.second.assign(n * n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t s = 0; s < n; ++s) {
        double v = 0;
        for (std::size_t j = 0; j < n; ++j) v += c.g_inv(k, j) * c.gamma_lowered(j, l, s);
        c.second[(k * n + l) * n + s] = v;
      }
  return c;
}

// ---------------------------------------------------------------------------
// Geodesics

double Path::speed(const MetricField& mf, std::size_t i) const {
  const Vec& v = velocities[i];
  return std::sqrt(std::max(0.0, v.dot(mf.metric(points[i]) * v)));
}

double Path::length(const MetricField& mf) const {
  if (points.size() < 2) return 0;
  double total = 0;
  double prev = speed(mf, 0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double cur = speed(mf, i);
    total += 0.5 * (prev + cur) * (tau[i] - tau[i - 1]);
    prev = cur;
  }
  return total;
}

namespace {

// −γ^k_ls v^l v^s without building the full symbol tables:
// g a = −w, w_j = ∂_s g_jl v^l v^s − ½ ∂_j g_ls v^l v^s.
Vec acceleration(const MetricField& mf, const Vec& x, const Vec& v) {
  constexpr double h = 1e-5;
  const auto n = x.size();
  Vec w = Vec::Zero(n), e = Vec::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    e(s) = h;
    const Mat d = (mf.metric(x + e) - mf.metric(x - e)) / (2 * h);
    e(s) = 0;
    const Vec dv = d * v;
    w += dv * v(s);
    w(s) -= 0.5 * v.dot(dv);
  }
  const Vec a = mf.metric(x).partialPivLu().solve(w);
  if (!a.allFinite()) throw DegenerateError("singular metric at x");
  return -a;
}

}  // namespace

Path geodesic_ivp(const MetricField& mf, const Vec& x0, const Vec& v0, double tau_end,
                  std::size_t steps) {
  const std::size_t n = mf.dimension();
  check_arity(x0, n, "start point");
  check_arity(v0, n, "initial velocity");
  if (steps == 0) throw ValidationError("geodesic needs at least one step");
  if (!mf.in_chart(x0)) throw DomainError("geodesic start outside the chart");
  Path p;
  p.tau.reserve(steps + 1);
  p.points.reserve(steps + 1);
  p.velocities.reserve(steps + 1);
  const double h = tau_end / static_cast<double>(steps);
  Vec x = x0, v = v0;
  p.tau.push_back(0);
  p.points.push_back(x);
  p.velocities.push_back(v);
  for (std::size_t i = 1; i <= steps; ++i) {
    const Vec k1x = v, k1v = acceleration(mf, x, v);
    const Vec x2 = x + 0.5 * h * k1x, v2 = v + 0.5 * h * k1v;
    if (!mf.in_chart(x2)) throw DomainError("geodesic left the chart");
    const Vec k2x = v2, k2v = acceleration(mf, x2, v2);
    const Vec x3 = x + 0.5 * h * k2x, v3 = v + 0.5 * h * k2v;
    if (!mf.in_chart(x3)) throw DomainError("geodesic left the chart");
    const Vec k3x = v3, k3v = acceleration(mf, x3, v3);
    const Vec x4 = x + h * k3x, v4 = v + h * k3v;
    if (!mf.in_chart(x4)) throw DomainError("geodesic left the chart");
    const Vec k4x = v4, k4v = acceleration(mf, x4, v4);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!mf.in_chart(x)) throw DomainError("geodesic left the chart");
    p.tau.push_back(h * static_cast<double>(i));
    p.points.push_back(x);
    p.velocities.push_back(v);
  }
  return p;
}

Path geodesic_bvp(const MetricField& mf, const Vec& xa, const Vec& xb, const BvpOptions& opt) {
  const std::size_t n = mf.dimension();
  check_arity(xa, n, "start point");
  check_arity(xb, n, "end point");
  if (!mf.in_chart(xa) || !mf.in_chart(xb)) throw DomainError("geodesic endpoint outside the chart");
  if (xa == xb) {
    Path p;
    for (std::size_t i = 0; i <= opt.steps; ++i) {
      p.tau.push_back(static_cast<double>(i) / static_cast<double>(opt.steps));
      p.points.push_back(xa);
      p.velocities.push_back(Vec::Zero(n));
    }
    return p;
  }
  const double target = opt.tolerance * std::max(1.0, xb.norm());

  auto shoot = [&](const Vec& v) -> std::optional<Path> {
    try {
      return geodesic_ivp(mf, xa, v, 1.0, opt.steps);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  auto attempt = [&](Vec v) -> std::optional<Path> {
    auto path = shoot(v);
    if (!path) return std::nullopt;
    Vec f = path->points.back() - xb;
    double nf = f.norm();
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
      if (nf <= target) return path;
      Mat jac(n, n);
      const double delta = 1e-7 * std::max(1.0, v.norm());
      for (std::size_t j = 0; j < n; ++j) {
        Vec vj = v;
        vj(j) += delta;
        auto pj = shoot(vj);
        if (!pj) return std::nullopt;
        jac.col(j) = (pj->points.back() - path->points.back()) / delta;
      }
      const Vec step = jac.fullPivLu().solve(f);
      if (!step.allFinite()) return std::nullopt;
      bool accepted = false;
      double lambda = 1;
      for (int half = 0; half < 12; ++half, lambda /= 2) {
        const Vec vn = v - lambda * step;
        auto pn = shoot(vn);
        if (!pn) continue;
        const Vec fn = pn->points.back() - xb;
        if (fn.norm() < nf) {
          v = vn;
          path = std::move(pn);
          f = fn;
          nf = fn.norm();
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (nf <= target) return path;
    return std::nullopt;
  };

  const Vec v0 = xb - xa;
  if (auto p = attempt(v0)) return std::move(*p);
  for (std::size_t k = 0; k < opt.restarts; ++k) {
    Vec v = v0;
    const double sign = (k / n) % 2 == 0 ? 1.0 : -1.0;
    const double scale = 0.3 * (1.0 + static_cast<double>(k / (2 * n)));
    v(k % n) += sign * scale * v0.norm();
    if (auto p = attempt(v)) return std::move(*p);
  }
  throw ConvergenceError("geodesic boundary value problem did not converge");
}

Real world_function_riemann(const MetricField& mf, const Vec& xa, const Vec& xb,
                            const BvpOptions& opt) {
  const double l = geodesic_bvp(mf, xa, xb, opt).length(mf);
  return static_cast<Real>(l) * l / 2;
}

namespace {

struct SigmaCache {
  std::shared_mutex mutex;
  std::map<std::vector<double>, Real> values;
  static constexpr std::size_t kCapacity = 1 << 20;
};

}  // namespace

WorldFunction make_riemannian(const MetricField& mf, const BvpOptions& opt) {
  auto cache = std::make_shared<SigmaCache>();
  return WorldFunction(
      "riemannian", Domain::continuous(mf.dimension(), mf.chart()),
      [mf, opt, cache](const Point& p, const Point& q) -> Real {
        std::vector<double> key(p.coords().begin(), p.coords().end());
        key.insert(key.end(), q.coords().begin(), q.coords().end());
        {
          std::shared_lock lock(cache->mutex);
          if (auto it = cache->values.find(key); it != cache->values.end()) return it->second;
        }
        const Real s = world_function_riemann(mf, to_vec(p), to_vec(q), opt);
        std::unique_lock lock(cache->mutex);
        if (cache->values.size() >= SigmaCache::kCapacity) cache->values.clear();
        cache->values.emplace(std::move(key), s);
        return s;
      });
}

WorldFunction make_sphere_analytic(double radius, std::optional<Box> chart) {
  if (!(radius > 0)) throw ValidationError("sphere radius must be positive");
  const Real r = radius;
  return WorldFunction(
      "sphere-analytic", Domain::continuous(2, chart_or(chart, default_sphere_chart())),
      [r](const Point& p, const Point& q) -> Real {
        auto unit = [](const Point& x) {
          const Real t = x[0], f = x[1];
          return std::array<Real, 3>{std::sin(t) * std::cos(f), std::sin(t) * std::sin(f),
                                     std::cos(t)};
        };
        const auto a = unit(p), b = unit(q);
        const Real cx = a[1] * b[2] - a[2] * b[1];
        const Real cy = a[2] * b[0] - a[0] * b[2];
        const Real cz = a[0] * b[1] - a[1] * b[0];
        const Real dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        const Real psi = std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
        return r * r * psi * psi / 2;
      });
}

Mat sigma_mixed_derivatives(const WorldFunction& wf, const Vec& x, const Vec& xp, double h) {
  const std::size_t n = wf.dimension();
  check_arity(x, n, "x");
  check_arity(xp, n, "x'");
  Mat s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      Vec ei = Vec::Zero(n), el = Vec::Zero(n);
      ei(i) = h;
      el(l) = h;
      const Real pp = wf(to_point(x + ei), to_point(xp + el));
      const Real pm = wf(to_point(x + ei), to_point(xp - el));
      const Real mp = wf(to_point(x - ei), to_point(xp + el));
      const Real mm = wf(to_point(x - ei), to_point(xp - el));
      s(i, l) = static_cast<double>((pp - pm - mp + mm) / (4 * Real(h) * h));
    }
  return s;
}

// ---------------------------------------------------------------------------
// Transport

double norm_squared(const MetricField& mf, const TangentVector& u) {
  return u.components.dot(mf.metric(u.base) * u.components);
}

Path straight_path(const Vec& xa, const Vec& xb, std::size_t steps) {
  if (steps == 0) throw ValidationError("path needs at least one step");
  Path p;
  const Vec v = xb - xa;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    p.tau.push_back(t);
    p.points.push_back(xa + t * v);
    p.velocities.push_back(v);
  }
  return p;
}

TangentVector transport_conventional(const MetricField& mf, const TangentVector& u,
                                     const Path& path) {
  const std::size_t n = mf.dimension();
  check_arity(u.base, n, "vector base");
  check_arity(u.components, n, "vector");
  if (path.size() == 0) throw ValidationError("transport path is empty");
  if ((path.points.front() - u.base).norm() > 1e-9 * (1 + u.base.norm()))
    throw ValidationError("transport path does not start at the vector's base point");
  Vec w = u.components;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double d = path.tau[i + 1] - path.tau[i];
    const Vec& x0 = path.points[i];
    const Vec& x1 = path.points[i + 1];
    const Vec& v0 = path.velocities[i];
    const Vec& v1 = path.velocities[i + 1];
    const Vec xm = 0.5 * (x0 + x1) + d * (v0 - v1) / 8;
    const Vec vm = 1.5 * (x1 - x0) / d - 0.25 * (v0 + v1);
    const Christoffel c0 = christoffel(mf, x0);
    const Christoffel cm = christoffel(mf, xm);
    const Christoffel c1 = christoffel(mf, x1);
    const Vec k1 = -c0.contract(w, v0);
    const Vec k2 = -cm.contract(w + 0.5 * d * k1, vm);
    const Vec k3 = -cm.contract(w + 0.5 * d * k2, vm);
    const Vec k4 = -c1.contract(w + d * k3, v1);
    w += d / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return {path.points.back(), w};
}

double rotation_angle(const MetricField& mf, const Vec& x, const Vec& a, const Vec& b) {
  if (mf.dimension() != 2) throw DomainError("rotation angle needs a two-dimensional chart");
  const Mat g = mf.metric(x);
  const double cross = std::sqrt(g.determinant()) * (a(0) * b(1) - a(1) * b(0));
  return std::atan2(cross, a.dot(g * b));
}

double direction_angle(const MetricField& mf, const Vec& x, const Vec& a, const Vec& b) {
  const Mat g = mf.metric(x);
  const double c = std::fabs(a.dot(g * b)) / std::sqrt(a.dot(g * a) * b.dot(g * b));
  return std::acos(std::min(1.0, c));
}

double parallelism_residual_wf(const WorldFunction& wf, const MetricField& mf,
                               const TangentVector& u, const TangentVector& v, double h) {
  const Mat s = sigma_mixed_derivatives(wf, u.base, v.base, h);
  const double usv = u.components.dot(s * v.components);
  return usv * usv - norm_squared(mf, u) * norm_squared(mf, v);
}

double linearized_parallelism_residual(const Christoffel& c, const Vec& u, const Vec& v,
                                       const Vec& dv, const Vec& dxi) {
  const std::size_t n = c.n;
  const double uv = u.dot(c.g * v), uu = u.dot(c.g * u), vv = v.dot(c.g * v);
  double g1 = 0, g2 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t b = 0; b < n; ++b) {
        g1 += c.gamma_lowered(i, l, b) * u(i) * v(l) * dxi(b);
        g2 += c.metric_derivative(i, l, b) * v(i) * v(l) * dxi(b);
      }
  const double udv = u.dot(c.g * dv), vdv = v.dot(c.g * dv);
  return uv * uv - uu * vv + 2 * uv * g1 - uu * g2 + 2 * uv * udv - 2 * uu * vdv;
}

double linearized_parallelism_residual(const MetricField& mf, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& dv, const Vec& dxi) {
  const std::size_t n = mf.dimension();
  check_arity(u, n, "u");
  check_arity(v, n, "v");
  check_arity(dv, n, "δv");
  check_arity(dxi, n, "dξ");
  return linearized_parallelism_residual(christoffel(mf, x), u, v, dv, dxi);
}

Vec conventional_step(const MetricField& mf, const Vec& x, const Vec& u, const Vec& dxi) {
  return u - christoffel(mf, x).contract(u, dxi);
}

// ---------------------------------------------------------------------------
// Collinearity cone

namespace {

// Directions w and −w are one direction; w wᵀ is a continuous coordinate on
// the space of directions.
Point direction_point(const Vec& w) {
  const Vec u = w / w.norm();
  Coords c;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < u.size(); ++j) c.push_back(u(i) * u(j));
  return Point(std::move(c));
}

Vec direction_from_point(const Point& p, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (p[j * n + j] > p[best * n + best]) best = j;
  Vec w(n);
  const double d = std::sqrt(std::max(p[best * n + best], 1e-300));
  for (std::size_t i = 0; i < n; ++i) w(i) = p[i * n + best] / d;
  return w;
}

}  // namespace

CollinearityCone collinearity_cone(const WorldFunction& wf, const MetricField& mf,
                                   const TangentVector& u, const Vec& dxi,
                                   const ConeOptions& options) {
  const std::size_t n = mf.dimension();
  check_arity(u.base, n, "vector base");
  check_arity(u.components, n, "vector");
  check_arity(dxi, n, "dξ");
  if (options.samples < 4) throw ValidationError("cone sampling needs at least 4 directions");
  if (!(options.tolerance > 0)) throw ValidationError("tolerance must be positive");
  const Vec x = u.base;
  const Vec xp = x + dxi;
  const Vec& uc = u.components;

  std::function<double(const Vec&)> residual;
  if (options.model == ConeModel::linearized) {
    const Christoffel c = christoffel(mf, x);
    const Vec zero = Vec::Zero(n);
    const double uu = uc.dot(c.g * uc);
    residual = [c, uc, dxi, zero, uu](const Vec& w) {
      return linearized_parallelism_residual(c, uc, w, zero, dxi) / (uu * w.dot(c.g * w));
    };
  } else {
    if (wf.dimension() != n) throw DomainError("world function and metric have different charts");
    const Mat s = sigma_mixed_derivatives(wf, x, xp, options.h);
    const Mat gp = mf.metric(xp);
    const double uu = uc.dot(mf.metric(x) * uc);
    residual = [s, gp, uc, uu](const Vec& w) {
      const double usw = uc.dot(s * w);
      const double ww = w.dot(gp * w);
      return (usw * usw - uu * ww) / (uu * ww);
    };
  }
  Residual r_w = [residual](const Point& p) -> ResidualVector {
    const Vec w = to_vec(p);
    if (w.norm() == 0) throw DegenerateError("zero direction");
    return {static_cast<Real>(residual(w))};
  };

  // Seeds: half circle for n = 2, random hemisphere otherwise.
  std::vector<Point> seeds;
  const Vec e1 = uc / uc.norm();
  if (n == 2) {
    Vec e2(2);
    e2 << -e1(1), e1(0);
    for (std::size_t k = 0; k < options.samples; ++k) {
      const double a = -kPi / 2 + kPi * (static_cast<double>(k) + 0.5) /
                                      static_cast<double>(options.samples);
      seeds.push_back(to_point(std::cos(a) * e1 + std::sin(a) * e2));
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < options.samples; ++k) {
      Vec w(n);
      for (std::size_t i = 0; i < n; ++i) w(i) = normal(rng);
      if (w.dot(e1) < 0) w = -w;
      seeds.push_back(to_point(w / w.norm()));
    }
  }

  std::vector<std::optional<Point>> refined(seeds.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seeds.size()); ++i) {
    auto res = refine_to_zero(r_w, seeds[i], 1e-6, options.tolerance);
    if (!res.converged) continue;
    const Vec w = to_vec(res.point);
    if (w.norm() == 0) continue;
    refined[i] = direction_point(w);
  }
  std::vector<Point> pts;
  for (auto& p : refined)
    if (p) pts.push_back(std::move(*p));

  const double spacing = n == 2 ? kPi / static_cast<double>(options.samples)
                                : std::sqrt(2 * kPi / static_cast<double>(options.samples));
  SolveOptions so;
  so.tolerance = options.tolerance;
  so.merge_radius = std::sqrt(2.0) * options.merge_angle;
  Residual r_dir = [r_w, n](const Point& p) { return r_w(to_point(direction_from_point(p, n))); };
  CollinearityCone cone;
  cone.directions = assemble_solution_set(std::move(pts), r_dir, Box::cube(n * n, -1, 1),
                                          std::sqrt(2.0) * spacing, so);
  cone.directions.candidates = seeds.size();

  const Mat gp = mf.metric(xp);
  auto unit = [&](Vec w) {
    w /= std::sqrt(w.dot(gp * w));
    if (w.dot(gp * uc) < 0) w = -w;
    return w;
  };
  for (const auto& p : cone.directions.representatives)
    cone.zero_directions.push_back(unit(direction_from_point(p, n)));
  for (const auto& c : cone.directions.clusters) cone.cluster_directions.push_back(cone.zero_directions[c.anchor]);
  cone.degenerate = cone.directions.count() == 1 && cone.directions.clusters[0].local_dimension == 0;
  for (std::size_t i = 0; i < cone.zero_directions.size(); ++i)
    for (std::size_t j = i + 1; j < cone.zero_directions.size(); ++j)
      cone.aperture = std::max(cone.aperture, direction_angle(mf, xp, cone.zero_directions[i],
                                                              cone.zero_directions[j]));
  return cone;
}

}  // namespace worldfn

namespace worldfn {

double holonomy_angle(const MetricField& mf, const std::vector<Vec>& loop, const Vec& u0,
                      const BvpOptions& opt) {
  if (loop.size() < 3) throw ValidationError("holonomy loop needs at least three vertices");
  check_arity(u0, mf.dimension(), "vector");
  TangentVector u{loop.front(), u0};
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec& b = loop[(i + 1) % loop.size()];
    u = transport_conventional(mf, u, geodesic_bvp(mf, u.base, b, opt));
    u.base = b;
  }
  return rotation_angle(mf, loop.front(), u0, u.components);
}

Vec sphere_chart_point(const Eigen::Vector3d& e) {
  const Eigen::Vector3d n = e.normalized();
  Vec x(2);
  x << std::acos(std::clamp(n.z(), -1.0, 1.0)), std::atan2(n.y(), n.x());
  return x;
}

std::vector<Vec> rotated_octant_triangle() {
  const Eigen::Vector3d centre = Eigen::Vector3d::Ones().normalized();
  const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(centre, Eigen::Vector3d::UnitX());
  std::vector<Vec> v;
  for (const Eigen::Vector3d& e :
       {Eigen::Vector3d::UnitX().eval(), Eigen::Vector3d::UnitY().eval(), Eigen::Vector3d::UnitZ().eval()})
    v.push_back(sphere_chart_point(q * e));
  return v;
}

double conventional_step_residual(const WorldFunction& wf, const MetricField& mf, const Vec& x,
                                  const Vec& u, const Vec& dxi, double h) {
  const Vec v = conventional_step(mf, x, u, dxi);
  const TangentVector tu{x, u}, tv{x + dxi, v};
  return std::fabs(parallelism_residual_wf(wf, mf, tu, tv, h)) /
         (norm_squared(mf, tu) * norm_squared(mf, tv));
}

}  // namespace worldfn
