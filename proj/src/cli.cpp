#include "worldfn/cli.hpp"

#include "worldfn/algebra.hpp"
#include "worldfn/geometries.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace worldfn::cli {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::string> kCommands = {"eval",     "scalar",   "equiv", "segment",
                                            "straight", "straight2", "cylinder", "cone",
                                            "transport-compare", "verify"};

struct Context {
  Geometry geo;
  Json args;
  Overrides overrides;

  const Domain& domain() const { return geo.wf.domain(); }

  bool has(const char* key) const { return args.contains(key); }

  const Json& at(const char* key) const {
    if (!args.contains(key)) throw ValidationError(std::string("args: missing field '") + key + "'");
    return args.at(key);
  }

  Point point(const char* key) const { return parse_point(at(key), domain()); }

  PointPairVector pair(const char* key) const {
    const Json& j = at(key);
    if (!j.is_array() || j.size() != 2)
      throw ValidationError(std::string(key) + " must be a pair [origin, tip]");
    return {parse_point(j[0], domain()), parse_point(j[1], domain())};
  }

  double tolerance(double fallback) const {
    double t = fallback;
    if (has("tolerance")) t = at("tolerance").get<double>();
    if (overrides.tolerance) t = *overrides.tolerance;
    if (!(t > 0) || !std::isfinite(t)) throw ValidationError("tolerance must be positive");
    return t;
  }

  std::size_t grid(std::size_t fallback) const {
    long long g = static_cast<long long>(fallback);
    if (has("grid")) g = at("grid").get<long long>();
    if (overrides.grid) g = static_cast<long long>(*overrides.grid);
    if (g < 2) throw ValidationError("grid needs at least 2 points per axis");
    return static_cast<std::size_t>(g);
  }

  std::uint64_t seed(std::uint64_t fallback) const {
    std::uint64_t s = fallback;
    if (has("seed")) s = at("seed").get<std::uint64_t>();
    if (overrides.seed) s = *overrides.seed;
    return s;
  }

  Box region() const {
    if (domain().is_discrete()) return {};
    Box b = has("region") ? parse_box(at("region")) : domain().box;
    if (b.dimension() != domain().dimension)
      throw ValidationError("region dimension does not match the geometry");
    return b;
  }

  SamplingSpec sampling(std::size_t default_grid = 33) const {
    if (domain().is_discrete())
      throw ValidationError("point-set extraction needs a continuous geometry");
    SamplingSpec s;
    s.region = region();
    s.points_per_axis = grid(default_grid);
    s.tolerance = tolerance(1e-9);
    return s;
  }

  const MetricField& metric() const {
    if (!geo.metric) throw ValidationError("this command needs a riemannian geometry");
    return *geo.metric;
  }
};

std::vector<std::string> coord_header(std::size_t n, const std::string& prefix = "x") {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

std::vector<std::string> coord_cells(const Point& p) {
  std::vector<std::string> c;
  if (p.is_discrete()) return {std::to_string(p.id())};
  for (double v : p.coords()) c.push_back(format_number(v));
  return c;
}

std::string num(long double v) { return format_number(static_cast<double>(v)); }

std::string point_text(const Point& p) {
  if (p.is_discrete()) return std::to_string(p.id());
  std::string s = "(";
  for (std::size_t i = 0; i < p.arity(); ++i) s += (i ? ", " : "") + format_number(p[i]);
  return s + ")";
}

Json pair_json(const PointPairVector& v) { return Json::array({point_json(v.origin), point_json(v.tip)}); }

std::size_t arity(const Domain& d) { return d.is_discrete() ? 1 : d.dimension; }

void append_point_set(CommandResult& r, const std::string& label, const SampledPointSet& s,
                      std::size_t n) {
  if (r.table.empty()) {
    auto h = coord_header(n);
    h.insert(h.begin(), "set");
    h.push_back("residual");
    r.table.push_back(h);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto row = coord_cells(s.points[i]);
    row.insert(row.begin(), label);
    row.push_back(format_number(s.residuals[i]));
    r.table.push_back(row);
  }
}

std::string set_summary(const std::string& label, const SampledPointSet& s) {
  std::ostringstream o;
  o << label << ": " << s.size() << " points, local dimension " << s.local_dimension
    << ", resolution " << format_number(s.resolution) << "\n";
  return o.str();
}

Json coincidence_json(const Coincidence& c) {
  return Json{{"hausdorff", c.hausdorff}, {"threshold", c.threshold}, {"coincide", c.coincide}};
}

// ---------------------------------------------------------------------------

CommandResult cmd_eval(const Context& c) {
  CommandResult r;
  const Json& pairs = c.at("pairs");
  if (!pairs.is_array() || pairs.empty()) throw ValidationError("pairs must be a non-empty array");
  r.table.push_back({"p", "q", "sigma"});
  Json values = Json::array();
  for (const auto& pq : pairs) {
    if (!pq.is_array() || pq.size() != 2) throw ValidationError("each pair must be [P, Q]");
    const Point p = parse_point(pq[0], c.domain()), q = parse_point(pq[1], c.domain());
    const Real s = c.geo.wf(p, q);
    values.push_back(Json{{"p", point_json(p)}, {"q", point_json(q)}, {"sigma", static_cast<double>(s)}});
    r.table.push_back({point_text(p), point_text(q), num(s)});
    r.summary += num(s) + "\n";
  }
  r.json["values"] = std::move(values);
  return r;
}

CommandResult cmd_scalar(const Context& c) {
  CommandResult r;
  const auto a = c.pair("a"), b = c.pair("b");
  const Real sp = scalar_product(c.geo.wf, a, b);
  r.json["a"] = pair_json(a);
  r.json["b"] = pair_json(b);
  r.json["scalar_product"] = static_cast<double>(sp);
  r.json["length_squared_a"] = static_cast<double>(length_squared(c.geo.wf, a));
  r.json["length_squared_b"] = static_cast<double>(length_squared(c.geo.wf, b));
  r.table = {{"quantity", "value"},
             {"scalar_product", num(sp)},
             {"length_squared_a", num(length_squared(c.geo.wf, a))},
             {"length_squared_b", num(length_squared(c.geo.wf, b))}};
  r.summary = num(sp) + "\n";
  return r;
}

CommandResult cmd_equiv(const Context& c) {
  CommandResult r;
  const auto a = c.pair("a");
  const Point q0 = c.point("q0");
  SolveOptions opt;
  opt.tolerance = c.tolerance(1e-9);
  opt.grid.points_per_axis = c.grid(33);
  const SolutionSet s = solve_equivalence(c.geo.wf, a, q0, c.region(), opt);
  r.json["a"] = pair_json(a);
  r.json["q0"] = point_json(q0);
  const Json sj = solution_set_json(s);
  for (auto& [k, v] : sj.items()) r.json[k] = v;

  auto h = coord_header(arity(c.domain()));
  h.insert(h.begin(), {"cluster", "dimension"});
  h.push_back("residual");
  r.table.push_back(h);
  for (std::size_t i = 0; i < s.representatives.size(); ++i) {
    auto row = coord_cells(s.representatives[i]);
    const std::size_t k = s.cluster_of[i];
    row.insert(row.begin(), {std::to_string(k), std::to_string(s.clusters[k].local_dimension)});
    row.push_back(format_number(s.residual_norms[i]));
    r.table.push_back(row);
  }
  const auto rep = summarize(s);
  std::ostringstream o;
  o << "count: " << (rep.continuum ? std::string("continuum") : std::to_string(rep.count)) << "\n";
  o << "dimensions:";
  for (int d : rep.dimensions) o << " " << d;
  o << "\nsingle-variant: " << (rep.is_single_variant ? "yes" : "no") << "\n";
  r.summary = o.str();
  return r;
}

CommandResult cmd_segment(const Context& c) {
  CommandResult r;
  const Point p0 = c.point("p0"), p1 = c.point("p1");
  const std::string method = c.args.value("method", "both");
  if (method != "triangle" && method != "parallelism" && method != "both")
    throw ValidationError("segment method must be triangle, parallelism or both");
  const SamplingSpec spec = c.sampling();
  const std::size_t n = arity(c.domain());
  std::optional<SampledPointSet> tri, par;
  if (method != "parallelism") tri = segment_by_triangle(c.geo.wf, p0, p1, spec);
  if (method != "triangle") par = segment_by_parallelism(c.geo.wf, p0, p1, spec);
  if (tri) {
    r.json["triangle"] = point_set_json(*tri);
    append_point_set(r, "triangle", *tri, n);
    r.summary += set_summary("triangle", *tri);
  }
  if (par) {
    r.json["parallelism"] = point_set_json(*par);
    append_point_set(r, "parallelism", *par, n);
    r.summary += set_summary("parallelism", *par);
  }
  if (tri && par && !tri->empty() && !par->empty()) {
    const auto co = set_coincidence(*tri, *par);
    r.json["coincidence"] = coincidence_json(co);
    r.summary += "hausdorff " + format_number(co.hausdorff) + " (threshold " +
                 format_number(co.threshold) + "): " + (co.coincide ? "coincide" : "differ") + "\n";
  }
  return r;
}

CommandResult cmd_straight(const Context& c, bool second_kind) {
  CommandResult r;
  const Point p0 = c.point("p0"), p1 = c.point("p1");
  const SamplingSpec spec = c.sampling();
  const SampledPointSet s = second_kind
                                ? straight_second_kind(c.geo.wf, p0, p1, c.point("q0"), spec)
                                : straight_first_kind(c.geo.wf, p0, p1, spec);
  r.json = point_set_json(s);
  append_point_set(r, second_kind ? "straight2" : "straight", s, arity(c.domain()));
  r.summary = set_summary(second_kind ? "straight (second kind)" : "straight (first kind)", s);
  return r;
}

CommandResult cmd_cylinder(const Context& c) {
  CommandResult r;
  const Point p0 = c.point("p0"), p1 = c.point("p1"), q = c.point("q");
  SamplingSpec spec = c.sampling();
  if (c.has("shell")) {
    const Json& sh = c.at("shell");
    const double inner = sh.at("inner").get<double>(), outer = sh.at("outer").get<double>();
    if (!(inner >= 0) || !(outer > inner)) throw ValidationError("shell needs 0 ≤ inner < outer");
    spec.mask = radial_shell(p0, p1, inner, outer);
  }
  const std::size_t n = arity(c.domain());
  const SampledPointSet a = cylinder(c.geo.wf, p0, p1, q, spec);
  r.json["cylinder"] = point_set_json(a);
  append_point_set(r, "cylinder", a, n);
  r.summary = set_summary("cylinder", a);
  if (c.has("p1_shifted")) {
    const Point p1s = c.point("p1_shifted");
    const SampledPointSet b = cylinder(c.geo.wf, p0, p1s, q, spec);
    r.json["shifted"] = point_set_json(b);
    append_point_set(r, "shifted", b, n);
    r.summary += set_summary("shifted", b);
    if (!a.empty() && !b.empty()) {
      const auto co = set_coincidence(a, b);
      r.json["coincidence"] = coincidence_json(co);
      r.summary += "hausdorff " + format_number(co.hausdorff) + " (threshold " +
                   format_number(co.threshold) + "): " + (co.coincide ? "coincide" : "differ") + "\n";
    }
  }
  return r;
}

ConeModel parse_model(const Context& c) {
  const std::string m = c.args.value("model", "linearized");
  if (m == "linearized") return ConeModel::linearized;
  if (m == "finite") return ConeModel::finite;
  throw ValidationError("cone model must be linearized or finite");
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

CommandResult cmd_cone(const Context& c) {
  CommandResult r;
  const MetricField& mf = c.metric();
  const std::size_t n = mf.dimension();
  const Vec x = parse_vec(c.at("x"), n, "x"), u = parse_vec(c.at("u"), n, "u"),
            dxi = parse_vec(c.at("dxi"), n, "dxi");
  ConeOptions opt;
  opt.model = parse_model(c);
  opt.samples = c.args.value("samples", opt.samples);
  opt.seed = c.seed(opt.seed);
  if (c.has("tolerance") || c.overrides.tolerance) opt.tolerance = c.tolerance(opt.tolerance);
  const auto cone = collinearity_cone(c.geo.wf, mf, {x, u}, dxi, opt);
  const Vec conv = conventional_step(mf, x, u, dxi);
  const Vec xp = x + dxi;

  r.json["x"] = vec_json(x);
  r.json["u"] = vec_json(u);
  r.json["dxi"] = vec_json(dxi);
  r.json["model"] = opt.model == ConeModel::linearized ? "linearized" : "finite";
  r.json["degenerate"] = cone.degenerate;
  r.json["aperture"] = cone.aperture;
  r.json["conventional"] = vec_json(conv);
  Json dirs = Json::array();
  auto h = coord_header(n, "w");
  h.insert(h.begin(), "cluster");
  h.push_back("angle_to_conventional");
  r.table.push_back(h);
  for (std::size_t k = 0; k < cone.cluster_directions.size(); ++k) {
    const Vec& w = cone.cluster_directions[k];
    const double ang = direction_angle(mf, xp, w, conv);
    dirs.push_back(Json{{"direction", vec_json(w)},
                        {"dimension", cone.directions.clusters[k].local_dimension},
                        {"angle_to_conventional", ang}});
    std::vector<std::string> row{std::to_string(k)};
    for (Eigen::Index i = 0; i < w.size(); ++i) row.push_back(format_number(w(i)));
    row.push_back(format_number(ang));
    r.table.push_back(row);
  }
  r.json["directions"] = std::move(dirs);
  std::ostringstream o;
  o << "zero directions: " << cone.cluster_directions.size()
    << (cone.degenerate ? " (degenerate cone)" : "") << "\n";
  o << "aperture: " << format_number(cone.aperture) << "\n";
  r.summary = o.str();
  return r;
}

// Metric-orthonormal pair (e_u, e_perp) at x for a two-dimensional chart.
std::pair<Vec, Vec> orthonormal_frame(const MetricField& mf, const Vec& x, const Vec& u) {
  const Mat g = mf.metric(x);
  Vec e1 = u / std::sqrt(u.dot(g * u));
  Vec t = Vec::Unit(2, std::fabs(e1(0)) > std::fabs(e1(1)) ? 1 : 0);
  Vec e2 = t - t.dot(g * e1) * e1;
  e2 /= std::sqrt(e2.dot(g * e2));
  return {e1, e2};
}

double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]) / m;
    my += std::log(ys[i]) / m;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

CommandResult cmd_transport(const Context& c) {
  CommandResult r;
  const MetricField& mf = c.metric();
  if (mf.dimension() != 2) throw ValidationError("transport-compare needs a two-dimensional chart");

  std::vector<Vec> loop;
  bool octant = true;
  if (c.has("triangle") && c.at("triangle").is_array()) {
    octant = false;
    for (const auto& v : c.at("triangle")) loop.push_back(parse_vec(v, 2, "triangle vertex"));
  } else if (c.has("triangle") && c.at("triangle") != "octant") {
    throw ValidationError("triangle must be \"octant\" or a list of vertices");
  } else {
    loop = rotated_octant_triangle();
  }
  const Vec u0 = c.has("u") ? parse_vec(c.at("u"), 2, "u") : Vec::Unit(2, 0);
  const double hol = holonomy_angle(mf, loop, u0);
  Json tri = Json::array();
  for (const auto& v : loop) tri.push_back(vec_json(v));
  r.json["triangle"] = tri;
  r.json["holonomy"] = hol;
  if (octant) r.json["expected_holonomy"] = kPi / 2;
  r.table.push_back({"quantity", "angle_deg", "step", "value"});
  r.table.push_back({"holonomy", "", "", format_number(hol)});
  if (c.has("path_csv")) {
    std::vector<Path> edges;
    for (std::size_t i = 0; i < loop.size(); ++i)
      edges.push_back(geodesic_bvp(mf, loop[i], loop[(i + 1) % loop.size()]));
    const std::string file = c.at("path_csv").get<std::string>();
    std::ofstream f(file);
    if (!f) throw ValidationError("cannot write '" + file + "'");
    f << paths_csv(edges, mf);
    r.json["path_csv"] = file;
  }
  r.summary = "holonomy angle: " + format_number(hol) +
              (octant ? " (octant triangle, expected " + format_number(kPi / 2) + ")" : "") + "\n";

  Vec x(2);
  x << 1.0, 0.3;
  if (c.has("x")) x = parse_vec(c.at("x"), 2, "x");
  const Vec u = c.has("u") ? parse_vec(c.at("u"), 2, "u") : Vec::Unit(2, 0);
  std::vector<double> steps{0.1, 0.05, 0.025, 0.0125};
  if (c.has("step_sizes")) steps = c.at("step_sizes").get<std::vector<double>>();
  std::vector<double> angles{0, 30, 60, 90};
  if (c.has("angles_deg")) angles = c.at("angles_deg").get<std::vector<double>>();
  const double cone_step = c.args.value("cone_step", 0.1);
  for (double s : steps)
    if (!(s > 0)) throw ValidationError("step sizes must be positive");
  if (steps.size() < 2) throw ValidationError("need at least two step sizes for the slope fit");

  ConeOptions copt;
  copt.model = parse_model(c);
  copt.seed = c.seed(copt.seed);
  const auto [e1, e2] = orthonormal_frame(mf, x, u);
  Json rows = Json::array();
  std::ostringstream o;
  o << std::left << std::setw(10) << "angle" << std::setw(12) << "directions" << std::setw(22)
    << "aperture" << "step-residual slope\n";
  for (double deg : angles) {
    const double beta = deg * kPi / 180;
    const Vec dir = std::cos(beta) * e1 + std::sin(beta) * e2;
    std::vector<double> res;
    Json per_step = Json::array();
    for (double s : steps) {
      const double v = conventional_step_residual(c.geo.wf, mf, x, u, s * dir);
      res.push_back(v);
      per_step.push_back(Json{{"step", s}, {"residual", v}});
      r.table.push_back({"step_residual", format_number(deg), format_number(s), format_number(v)});
    }
    const bool fit = std::all_of(res.begin(), res.end(), [](double v) { return v > 1e-10; });
    const double slope = fit ? fitted_slope(steps, res) : std::nan("");
    const auto cone = collinearity_cone(c.geo.wf, mf, {x, u}, cone_step * dir, copt);
    r.table.push_back({"cone_aperture", format_number(deg), format_number(cone_step),
                       format_number(cone.aperture)});
    r.table.push_back({"cone_directions", format_number(deg), format_number(cone_step),
                       std::to_string(cone.cluster_directions.size())});
    Json row{{"angle_deg", deg},
             {"step_residuals", per_step},
             {"slope", fit ? Json(slope) : Json(nullptr)},
             {"cone_directions", cone.cluster_directions.size()},
             {"cone_aperture", cone.aperture},
             {"cone_degenerate", cone.degenerate}};
    rows.push_back(std::move(row));
    o << std::setw(10) << format_number(deg) << std::setw(12) << cone.cluster_directions.size()
      << std::setw(22) << format_number(cone.aperture)
      << (fit ? format_number(slope) : std::string("(residual at noise level)")) << "\n";
  }
  r.json["x"] = vec_json(x);
  r.json["u"] = vec_json(u);
  r.json["cone_step"] = cone_step;
  r.json["angles"] = std::move(rows);
  r.summary += o.str();
  return r;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name, status, detail;
};

class Sampler {
 public:
  Sampler(const Domain& d, std::uint64_t seed) : d_(d), rng_(seed) {}
  Point operator()() {
    if (d_.is_discrete())
      return Point::discrete(std::uniform_int_distribution<std::size_t>(0, d_.point_count - 1)(rng_));
    Coords c;
    for (std::size_t i = 0; i < d_.dimension; ++i)
      c.push_back(std::uniform_real_distribution<double>(d_.box.lower[i], d_.box.upper[i])(rng_));
    return Point(std::move(c));
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  const Domain& d_;
  std::mt19937_64 rng_;
};

std::string pass(bool ok) { return ok ? "pass" : "fail"; }

Point translated(const Point& p, const Coords& t) {
  Coords c = p.coords();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += t[i];
  return Point(std::move(c));
}

Json witness_search(const Context& c, Sampler& draw, Check& out) {
  const Domain& d = c.domain();
  if (d.is_discrete() || d.dimension < 2 || d.dimension > 3 || c.geo.metric) {
    out = {"intransitivity witness", "skipped", "needs a 2- or 3-dimensional non-riemannian chart"};
    return nullptr;
  }
  const std::size_t draws = c.args.value("witness_draws", std::size_t{20});
  SolveOptions opt;
  opt.grid.points_per_axis = c.grid(d.dimension == 2 ? 33 : 17);
  const auto& g = c.geo.wf;
  for (std::size_t k = 0; k < draws; ++k) {
    const PointPairVector a{draw(), draw()};
    const Point q0 = draw();
    const double len = distance(a.origin, a.tip);
    if (len < 1e-3) continue;
    SolutionSet s;
    try {
      s = solve_equivalence(g, a, q0, Box::around(q0, 1.25 * len), opt);
    } catch (const Error&) {
      continue;
    }
    if (s.representatives.size() < 2 || (s.count() < 2 && !s.has_continuum())) continue;
    double best = 0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < s.representatives.size(); ++i)
      for (std::size_t j = i + 1; j < s.representatives.size(); ++j) {
        const double r = static_cast<double>(
            equivalence_residual(g, {q0, s.representatives[i]}, {q0, s.representatives[j]}).norm());
        if (r > best) best = r, bi = i, bj = j;
      }
    const PointPairVector x{q0, s.representatives[bi]}, z{q0, s.representatives[bj]};
    const double xy = static_cast<double>(equivalence_residual(g, x, a).norm());
    const double yz = static_cast<double>(equivalence_residual(g, a, z).norm());
    if (xy <= 1e-9 && yz <= 1e-9 && best > 1e-3) {
      std::ostringstream o;
      o << "draw " << k << ": |r(x,y)| " << format_number(xy) << ", |r(y,z)| " << format_number(yz)
        << ", |r(x,z)| " << format_number(best);
      out = {"intransitivity witness", "found", o.str()};
      return Json{{"x", pair_json(x)},
                  {"y", pair_json(a)},
                  {"z", pair_json(z)},
                  {"residual_xy", xy},
                  {"residual_yz", yz},
                  {"residual_xz", best},
                  {"draw", k}};
    }
  }
  out = {"intransitivity witness", "not found",
         "no multivariant equivalence in " + std::to_string(draws) + " draws"};
  return nullptr;
}

CommandResult cmd_verify(const Context& c) {
  CommandResult r;
  const auto& g = c.geo.wf;
  const Domain& d = c.domain();
  const std::size_t n = c.args.value("samples", std::size_t{200});
  if (n == 0) throw ValidationError("samples must be positive");
  Sampler draw(d, c.seed(1));
  std::vector<Check> checks;

  double sym = 0, diag = 0;
  bool finite = true;
  double sp_sym = 0, self_sp = 0, refl = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = draw(), q = draw(), s = draw(), t = draw();
    const Real pq = g(p, q), qp = g(q, p);
    finite = finite && std::isfinite(static_cast<double>(pq));
    sym = std::max(sym, static_cast<double>(std::fabs(pq - qp)));
    diag = std::max(diag, static_cast<double>(std::fabs(g(p, p))));
    const PointPairVector a{p, q}, b{s, t};
    const Real ab = scalar_product(g, a, b), ba = scalar_product(g, b, a);
    sp_sym = std::max(sp_sym, static_cast<double>(std::fabs(ab - ba) / (1 + std::fabs(ab))));
    self_sp = std::max(self_sp, static_cast<double>(std::fabs(scalar_product(g, a, a) - length_squared(g, a)) /
                                                    (1 + std::fabs(length_squared(g, a)))));
    refl = std::max(refl, static_cast<double>(equivalence_residual(g, a, a).norm()));
  }
  checks.push_back({"finite values", pass(finite), std::to_string(n) + " pairs"});
  checks.push_back({"symmetry", pass(sym <= 1e-12), "max |σ(P,Q) − σ(Q,P)| " + format_number(sym)});
  checks.push_back({"zero diagonal", pass(diag == 0), "max |σ(P,P)| " + format_number(diag)});
  checks.push_back({"scalar product symmetry", pass(sp_sym <= 1e-12),
                    "max relative difference " + format_number(sp_sym)});
  checks.push_back({"self scalar product", pass(self_sp <= 1e-12),
                    "max relative |(a.a) − 2σ(a)| " + format_number(self_sp)});
  checks.push_back({"equivalence reflexive", pass(refl <= 1e-9),
                    "max |r(a,a)| " + format_number(refl)});

  // Factorization identity and triangle axiom on proper triples.
  double fact = 0, min_f3 = std::numeric_limits<double>::infinity();
  std::size_t proper = 0, negative_sign = 0, positive_sign = 0, violations = 0;
  auto triple = [&](const Point& p0, const Point& rr, const Point& p1) {
    if (g(p0, rr) < 0 || g(rr, p1) < 0 || g(p0, p1) < 0) return;
    ++proper;
    const auto f = factorization_identity_check(g, p0, rr, p1);
    const long double scale = 1 + std::fabs(f.lhs) + std::fabs(f.rhs);
    fact = std::max(fact, static_cast<double>(std::fabs(std::fabs(f.lhs) - std::fabs(f.rhs)) / scale));
    if (std::fabs(f.lhs + f.rhs) <= 1e-10 * scale) ++negative_sign;
    if (std::fabs(f.lhs - f.rhs) <= 1e-10 * scale) ++positive_sign;
    const double f3 = static_cast<double>(triangle_functions(g, p0, rr, p1).f3);
    min_f3 = std::min(min_f3, f3);
    if (f3 < -1e-6) ++violations;
  };
  for (std::size_t i = 0; i < n; ++i) triple(draw(), draw(), draw());
  if (!d.is_discrete()) {
    // Chart-collinear triples probe the boundary case of the axiom.
    for (std::size_t i = 0; i < n; ++i) {
      const Point p0 = draw(), p1 = draw();
      const double t = std::uniform_real_distribution<double>(0.1, 0.9)(draw.rng());
      Coords m;
      for (std::size_t k = 0; k < d.dimension; ++k) m.push_back(p0[k] + t * (p1[k] - p0[k]));
      triple(p0, Point(std::move(m)), p1);
    }
  }
  if (proper == 0) {
    checks.push_back({"factorization identity", "skipped", "no proper triples sampled"});
    checks.push_back({"triangle axiom", "skipped", "no proper triples sampled"});
  } else {
    const std::string sign = negative_sign == proper   ? "lhs = −¼F0F1F2F3 on all"
                             : positive_sign == proper ? "lhs = +¼F0F1F2F3 on all"
                                                       : "sign not stable";
    checks.push_back({"factorization identity", pass(fact <= 1e-10 && sign != "sign not stable"),
                      std::to_string(proper) + " triples, max relative ||lhs| − |rhs|| " +
                          format_number(fact) + ", " + sign});
    checks.push_back({"triangle axiom", violations == 0 ? "holds" : "violated",
                      "min F3 " + format_number(min_f3) + ", " + std::to_string(violations) +
                          " triples below −1e-6"});
  }

  const auto kind = c.geo.spec.kind;
  if (kind == GeometryKind::euclidean || kind == GeometryKind::minkowski) {
    double tr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = draw(), q = draw(), t = draw();
      const Real a = g(p, q), b = g(translated(p, t.coords()), translated(q, t.coords()));
      tr = std::max(tr, static_cast<double>(std::fabs(a - b) / (1 + std::fabs(a))));
    }
    checks.push_back({"translation invariance", pass(tr <= 1e-12),
                      "max relative change " + format_number(tr)});
  } else {
    checks.push_back({"translation invariance", "skipped", "only defined for flat built-ins"});
  }

  Check w;
  Json witness = witness_search(c, draw, w);
  checks.push_back(w);

  r.table.push_back({"check", "status", "detail"});
  Json cj = Json::array();
  std::ostringstream o;
  for (const auto& ch : checks) {
    r.table.push_back({ch.name, ch.status, ch.detail});
    cj.push_back(Json{{"check", ch.name}, {"status", ch.status}, {"detail", ch.detail}});
    o << std::left << std::setw(26) << ch.name << std::setw(11) << ch.status << ch.detail << "\n";
    r.failed = r.failed || ch.status == "fail";
  }
  r.json["checks"] = std::move(cj);
  r.json["witness"] = std::move(witness);
  r.summary = o.str();
  return r;
}

std::string render_csv(const CommandResult& r) {
  std::string s;
  for (const auto& row : r.table) s += csv_line(row);
  return s;
}

}  // namespace

const std::vector<std::string>& commands() { return kCommands; }

CommandResult execute(const std::string& command, const Json& config,
                      const std::filesystem::path& base_dir, const Overrides& overrides) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ValidationError("unknown command '" + command + "'");
  if (!config.is_object()) throw ValidationError("config must be a JSON object");
  if (config.contains("command") && config.at("command") != command)
    throw ValidationError("config is for command '" + config.at("command").get<std::string>() +
                          "', not '" + command + "'");
  if (!config.contains("geometry")) throw ValidationError("config: missing field 'geometry'");
  Context c{build_geometry(parse_geometry_spec(config.at("geometry"), base_dir)),
            config.value("args", Json::object()), overrides};
  if (!c.args.is_object()) throw ValidationError("args must be an object");

  CommandResult r;
  if (command == "eval") r = cmd_eval(c);
  else if (command == "scalar") r = cmd_scalar(c);
  else if (command == "equiv") r = cmd_equiv(c);
  else if (command == "segment") r = cmd_segment(c);
  else if (command == "straight") r = cmd_straight(c, false);
  else if (command == "straight2") r = cmd_straight(c, true);
  else if (command == "cylinder") r = cmd_cylinder(c);
  else if (command == "cone") r = cmd_cone(c);
  else if (command == "transport-compare") r = cmd_transport(c);
  else r = cmd_verify(c);

  Json full;
  full["command"] = command;
  full["geometry"] = Json{{"kind", to_string(c.geo.spec.kind)}, {"name", c.geo.wf.name()}};
  for (auto& [k, v] : r.json.items()) full[k] = v;
  r.json = std::move(full);
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on geometries defined by a world function", "worldfn"};
  std::string command, config_path, out_path, format;
  double tol = 0;
  long long grid = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_path, "Output file; overrides the config's output.path");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  auto* tol_opt = app.add_option("--tol", tol, "Membership / residual tolerance");
  auto* grid_opt = app.add_option("--grid", grid, "Seeding grid points per axis");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random sampling");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "worldfn: " << e.what() << "\n";
    return 1;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open config '" + config_path + "'");
    Json config;
    try {
      config = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    Overrides ov;
    if (*tol_opt) {
      if (!(tol > 0) || !std::isfinite(tol)) throw ValidationError("--tol must be positive");
      ov.tolerance = tol;
    }
    if (*grid_opt) {
      if (grid < 2) throw ValidationError("--grid needs at least 2");
      ov.grid = static_cast<std::size_t>(grid);
    }
    if (*seed_opt) ov.seed = seed;

    const Json output = config.is_object() ? config.value("output", Json::object()) : Json::object();
    if (format.empty()) format = output.value("format", "json");
    if (format != "json" && format != "csv") throw ValidationError("format must be csv or json");
    if (out_path.empty()) out_path = output.value("path", "");

    const CommandResult r =
        execute(command, config, std::filesystem::path(config_path).parent_path(), ov);
    const std::string payload = format == "json" ? r.json.dump(2) + "\n" : render_csv(r);
    out << r.summary;
    if (out_path.empty()) {
      out << payload;
    } else {
      std::ofstream f(out_path);
      if (!f) throw ValidationError("cannot write '" + out_path + "'");
      f << payload;
    }
    if (r.failed) {
      err << "worldfn: verify found failing checks\n";
      return 1;
    }
    return 0;
  } catch (const ConvergenceError& e) {
    err << "worldfn: solver failure: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "worldfn: invalid config: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "worldfn: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace worldfn::cli
