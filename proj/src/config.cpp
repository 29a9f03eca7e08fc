#include "worldfn/config.hpp"

#include "worldfn/expression.hpp"
#include "worldfn/geometries.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace worldfn {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(what + " must be finite");
  return v;
}

std::size_t positive_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() <= 0)
    throw ValidationError(what + " must be a positive integer");
  return j.get<std::size_t>();
}

std::vector<std::string> coordinate_names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

std::optional<Box> optional_chart(const Json& j) {
  if (j.is_object() && j.contains("chart")) return parse_box(j.at("chart"));
  return std::nullopt;
}

}  // namespace

std::string to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::euclidean: return "euclidean";
    case GeometryKind::minkowski: return "minkowski";
    case GeometryKind::deformed: return "deformed";
    case GeometryKind::tabulated: return "tabulated";
    case GeometryKind::riemannian: return "riemannian";
  }
  return "?";
}

GeometryKind parse_geometry_kind(const std::string& s) {
  for (auto k : {GeometryKind::euclidean, GeometryKind::minkowski, GeometryKind::deformed,
                 GeometryKind::tabulated, GeometryKind::riemannian})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown geometry kind '" + s + "'");
}

Box parse_box(const Json& j) {
  Box b;
  const auto& lo = require(j, "lower", "box");
  const auto& hi = require(j, "upper", "box");
  if (!lo.is_array() || !hi.is_array()) throw ValidationError("box bounds must be arrays");
  for (const auto& v : lo) b.lower.push_back(number(v, "box bound"));
  for (const auto& v : hi) b.upper.push_back(number(v, "box bound"));
  b.validate();
  return b;
}

Point parse_point(const Json& j, const Domain& domain) {
  Point p;
  if (domain.is_discrete()) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
      throw ValidationError("discrete point must be a non-negative integer id");
    p = Point::discrete(j.get<std::size_t>());
  } else {
    if (!j.is_array()) throw ValidationError("point must be an array of coordinates");
    Coords c;
    for (const auto& v : j) c.push_back(number(v, "coordinate"));
    p = Point(std::move(c));
  }
  try {
    domain.check(p);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return p;
}

Json point_json(const Point& p) {
  if (p.is_discrete()) return Json(p.id());
  Json a = Json::array();
  for (double v : p.coords()) a.push_back(v);
  return a;
}

Vec parse_vec(const Json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n)
    throw ValidationError(what + " must be an array of " + std::to_string(n) + " numbers");
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v(i) = number(j[i], what);
  return v;
}

MetricField parse_metric(const Json& j) {
  if (!j.is_object()) throw ValidationError("metric must be an object");
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").get<std::string>();
    if (preset == "sphere") {
      const double r = j.contains("radius") ? number(j.at("radius"), "radius") : 1.0;
      const bool embedded = j.value("embedded", false);
      return embedded ? MetricField::sphere_embedded(r, optional_chart(j))
                      : MetricField::sphere(r, optional_chart(j));
    }
    if (preset == "flat") {
      const std::size_t n = positive_int(require(j, "dimension", "flat metric"), "dimension");
      auto chart = optional_chart(j);
      return MetricField::flat(n, chart ? *chart : Box::cube(n, -10, 10));
    }
    throw ValidationError("unknown metric preset '" + preset + "'");
  }
  auto chart = optional_chart(j);
  if (j.contains("components")) {
    const auto& rows = j.at("components");
    const std::size_t n = rows.size();
    if (n == 0) throw ValidationError("metric components are empty");
    auto names = coordinate_names(n);
    std::vector<std::vector<std::shared_ptr<const Expression>>> expr(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n)
        throw ValidationError("metric components must form a square matrix");
      for (std::size_t k = 0; k < n; ++k)
        expr[i].push_back(std::make_shared<const Expression>(
            Expression::parse(rows[i][k].get<std::string>(), names)));
    }
    auto mf = MetricField::explicit_metric(
        n,
        [expr, n](const Vec& x) {
          std::vector<Real> v(x.data(), x.data() + x.size());
          Mat g(n, n);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) g(i, k) = static_cast<double>((*expr[i][k])(v));
          return g;
        },
        chart ? *chart : Box::cube(n, -10, 10));
    mf.validate();
    return mf;
  }
  if (j.contains("embedding")) {
    const std::size_t n = positive_int(require(j, "dimension", "embedding metric"), "dimension");
    std::vector<std::shared_ptr<const Expression>> expr;
    for (const auto& e : j.at("embedding"))
      expr.push_back(std::make_shared<const Expression>(
          Expression::parse(e.get<std::string>(), coordinate_names(n))));
    auto mf = MetricField::from_embedding(
        n,
        [expr](const Vec& x) {
          std::vector<Real> v(x.data(), x.data() + x.size());
          Vec out(expr.size());
          for (std::size_t l = 0; l < expr.size(); ++l) out(l) = static_cast<double>((*expr[l])(v));
          return out;
        },
        chart ? *chart : Box::cube(n, -10, 10));
    mf.validate();
    return mf;
  }
  throw ValidationError("metric needs 'preset', 'components' or 'embedding'");
}

GeometrySpec parse_geometry_spec(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("geometry must be an object");
  GeometrySpec s;
  s.kind = parse_geometry_kind(require(j, "kind", "geometry").get<std::string>());
  if (j.contains("dimension")) s.dimension = positive_int(j.at("dimension"), "dimension");
  if (j.contains("box")) s.box = parse_box(j.at("box"));
  switch (s.kind) {
    case GeometryKind::euclidean:
      if (s.dimension == 0) throw ValidationError("geometry: missing field 'dimension'");
      break;
    case GeometryKind::minkowski:
      if (s.dimension == 0) throw ValidationError("geometry: missing field 'dimension'");
      s.signature = j.value("signature", "+" + std::string(s.dimension - 1, '-'));
      if (s.signature != "+" + std::string(s.dimension - 1, '-'))
        throw ValidationError("Minkowski signature must be '+' followed by " +
                              std::to_string(s.dimension - 1) + " '-'");
      break;
    case GeometryKind::deformed:
      s.deformation = require(j, "deformation", "deformed geometry");
      if (j.contains("base")) {
        s.base = std::make_shared<GeometrySpec>(parse_geometry_spec(j.at("base"), base_dir));
      } else {
        if (s.dimension == 0) throw ValidationError("geometry: missing field 'dimension'");
        s.base = std::make_shared<GeometrySpec>();
        s.base->kind = GeometryKind::euclidean;
        s.base->dimension = s.dimension;
        s.base->box = s.box;
      }
      if (s.dimension == 0) s.dimension = s.base->dimension;
      break;
    case GeometryKind::tabulated:
      if (j.contains("table")) {
        s.table = j.at("table").get<std::vector<std::vector<double>>>();
      } else {
        s.table_path = base_dir / require(j, "table_path", "tabulated geometry").get<std::string>();
        if (!std::filesystem::exists(s.table_path))
          throw ValidationError("table file '" + s.table_path.string() + "' does not exist");
        s.table = read_sigma_table_csv(s.table_path);
      }
      break;
    case GeometryKind::riemannian:
      s.metric = require(j, "metric", "riemannian geometry");
      break;
  }
  return s;
}

Geometry build_geometry(const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::euclidean:
      return {spec, make_euclidean(spec.dimension, spec.box), std::nullopt};
    case GeometryKind::minkowski:
      return {spec, make_minkowski(spec.dimension, spec.box), std::nullopt};
    case GeometryKind::deformed: {
      const Geometry base = build_geometry(*spec.base);
      Deformation d;
      std::string name = "deformed";
      if (spec.deformation.is_string()) {
        d = deformation_from_expression(spec.deformation.get<std::string>(), base.wf.domain());
        name = "deformed(" + spec.deformation.get<std::string>() + ")";
      } else if (spec.deformation.is_object()) {
        const std::string preset = require(spec.deformation, "preset", "deformation").get<std::string>();
        if (preset == "offset") {
          const double lambda = number(require(spec.deformation, "lambda", "offset"), "lambda");
          d = offset_deformation(lambda);
          name = "offset(lambda=" + format_number(lambda) + ")";
        } else if (preset == "stretch") {
          const double alpha = number(require(spec.deformation, "alpha", "stretch"), "alpha");
          d = quadratic_stretch(alpha);
          name = "stretch(alpha=" + format_number(alpha) + ")";
        } else {
          throw ValidationError("unknown deformation preset '" + preset + "'");
        }
      } else {
        throw ValidationError("deformation must be an expression string or a preset object");
      }
      return {spec, make_deformed(base.wf, d, name), base.metric};
    }
    case GeometryKind::tabulated:
      return {spec, make_tabulated(spec.table), std::nullopt};
    case GeometryKind::riemannian: {
      MetricField mf = parse_metric(spec.metric);
      const bool analytic = spec.metric.is_object() && spec.metric.value("analytic", false);
      if (analytic) {
        if (spec.metric.value("preset", "") != "sphere")
          throw ValidationError("the analytic shortcut exists for the sphere preset only");
        const double r = spec.metric.contains("radius") ? number(spec.metric.at("radius"), "radius") : 1.0;
        return {spec, make_sphere_analytic(r, mf.chart()), mf};
      }
      return {spec, make_riemannian(mf), mf};
    }
  }
  throw ValidationError("unknown geometry kind");
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (!quote) {
      out += cells[i];
      continue;
    }
    out += '"';
    for (char c : cells[i]) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  return out + "\n";
}

std::string paths_csv(const std::vector<Path>& paths, const MetricField& mf) {
  std::vector<std::string> head{"segment", "tau"};
  for (std::size_t i = 0; i < mf.dimension(); ++i) head.push_back("x" + std::to_string(i));
  head.push_back("speed");
  std::string out = csv_line(head);
  for (std::size_t k = 0; k < paths.size(); ++k)
    for (std::size_t i = 0; i < paths[k].size(); ++i) {
      std::vector<std::string> row{std::to_string(k), format_number(paths[k].tau[i])};
      for (Eigen::Index j = 0; j < paths[k].points[i].size(); ++j)
        row.push_back(format_number(paths[k].points[i](j)));
      row.push_back(format_number(paths[k].speed(mf, i)));
      out += csv_line(row);
    }
  return out;
}

Json solution_set_json(const SolutionSet& s) {
  Json j;
  Json clusters = Json::array();
  for (const auto& c : s.clusters) {
    Json cj;
    cj["dimension"] = c.local_dimension;
    cj["anchor"] = point_json(s.representatives[c.anchor]);
    cj["size"] = c.members.size();
    Json reps = Json::array();
    for (std::size_t i : c.members)
      reps.push_back(Json{{"point", point_json(s.representatives[i])},
                          {"residual", s.residual_norms[i]}});
    cj["representatives"] = std::move(reps);
    clusters.push_back(std::move(cj));
  }
  const auto rep = summarize(s);
  j["count"] = rep.continuum ? Json("continuum") : Json(rep.count);
  j["clusters_found"] = rep.count;
  j["dimensions"] = rep.dimensions;
  j["is_single_variant"] = rep.is_single_variant;
  j["cluster_radius"] = s.cluster_radius;
  j["link_radius"] = s.link_radius;
  j["resolution"] = s.resolution;
  j["tolerance"] = s.tolerance;
  if (!s.searched_region.lower.empty())
    j["searched_region"] = Json{{"lower", s.searched_region.lower}, {"upper", s.searched_region.upper}};
  j["clusters"] = std::move(clusters);
  return j;
}

Json point_set_json(const SampledPointSet& s) {
  Json j;
  j["generator"] = s.generator;
  j["tolerance"] = s.tolerance;
  j["resolution"] = s.resolution;
  j["local_dimension"] = s.local_dimension;
  j["size"] = s.points.size();
  Json pts = Json::array();
  for (std::size_t i = 0; i < s.points.size(); ++i)
    pts.push_back(Json{{"point", point_json(s.points[i])}, {"residual", s.residuals[i]}});
  j["points"] = std::move(pts);
  return j;
}

}  // namespace worldfn
