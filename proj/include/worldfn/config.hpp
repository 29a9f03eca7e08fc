#pragma once

// JSON configuration: geometry specs, points, regions, metric fields; and
// result export helpers shared by the CLI.

#include "worldfn/core.hpp"
#include "worldfn/objects.hpp"
#include "worldfn/riemann.hpp"
#include "worldfn/solvers.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace worldfn {

using Json = nlohmann::ordered_json;

enum class GeometryKind { euclidean, minkowski, deformed, tabulated, riemannian };

std::string to_string(GeometryKind k);
GeometryKind parse_geometry_kind(const std::string& s);

struct GeometrySpec {
  GeometryKind kind = GeometryKind::euclidean;
  std::size_t dimension = 0;
  std::string signature;              // minkowski: "+-..-"
  std::optional<Box> box;             // continuous sampling region
  Json deformation;                   // deformed: expression string or preset object
  std::shared_ptr<GeometrySpec> base; // deformed: base geometry (euclidean if omitted)
  std::vector<std::vector<double>> table;  // tabulated, inline or loaded
  std::filesystem::path table_path;
  Json metric;                        // riemannian
};

// Relative table paths resolve against `base_dir`.
GeometrySpec parse_geometry_spec(const Json& j, const std::filesystem::path& base_dir);

struct Geometry {
  GeometrySpec spec;
  WorldFunction wf;
  std::optional<MetricField> metric;  // riemannian only
};

Geometry build_geometry(const GeometrySpec& spec);

// {"preset": "sphere", "radius": R, "embedded": bool} | {"preset": "flat",
// "dimension": n} | {"components": [[expr..]..]} | {"embedding": [expr..]};
// optional "chart": {"lower": [..], "upper": [..]}. Variables x0, x1, ...
MetricField parse_metric(const Json& j);

Box parse_box(const Json& j);
// Coordinate array for continuous domains, integer id for discrete ones.
Point parse_point(const Json& j, const Domain& domain);
Json point_json(const Point& p);
Vec parse_vec(const Json& j, std::size_t n, const std::string& what);

Json solution_set_json(const SolutionSet& s);
Json point_set_json(const SampledPointSet& s);

// Rows: segment, tau, x0.., speed.
std::string paths_csv(const std::vector<Path>& paths, const MetricField& mf);

// CSV with a header; numbers printed with 17 significant digits.
std::string csv_line(const std::vector<std::string>& cells);
std::string format_number(double v);

}  // namespace worldfn
