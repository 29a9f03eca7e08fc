#include "worldfn/geometries.hpp"

#include "worldfn/expression.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace worldfn {

namespace {

Box default_box(std::size_t n, const std::optional<Box>& box) {
  Box b = box ? *box : Box::cube(n, -1.0, 1.0);
  if (b.dimension() != n) throw ValidationError("bounding box arity does not match dimension");
  b.validate();
  return b;
}

Point random_point(const Domain& d, std::mt19937_64& rng) {
  if (d.is_discrete()) {
    std::uniform_int_distribution<std::size_t> pick(0, d.point_count - 1);
    return Point::discrete(pick(rng));
  }
  Coords c;
  for (std::size_t i = 0; i < d.dimension; ++i) {
    std::uniform_real_distribution<double> u(d.box.lower[i], d.box.upper[i]);
    c.push_back(u(rng));
  }
  return Point(std::move(c));
}

}  // namespace

WorldFunction make_euclidean(std::size_t n, std::optional<Box> box) {
  if (n == 0) throw ValidationError("Euclidean dimension must be at least 1");
  return WorldFunction("euclidean", Domain::continuous(n, default_box(n, box)),
                       [](const Point& p, const Point& q) -> Real {
                         const auto& a = p.coords();
                         const auto& b = q.coords();
                         Real s = 0;
                         for (std::size_t i = 0; i < a.size(); ++i) {
                           const Real d = static_cast<Real>(a[i]) - b[i];
                           s += d * d;
                         }
                         return s / 2;
                       });
}

WorldFunction make_minkowski(std::size_t n, std::optional<Box> box) {
  if (n < 2) throw ValidationError("Minkowski dimension must be at least 2");
  return WorldFunction("minkowski", Domain::continuous(n, default_box(n, box)),
                       [](const Point& p, const Point& q) -> Real {
                         const auto& a = p.coords();
                         const auto& b = q.coords();
                         const Real dt = static_cast<Real>(a[0]) - b[0];
                         Real s = dt * dt;
                         for (std::size_t i = 1; i < a.size(); ++i) {
                           const Real d = static_cast<Real>(a[i]) - b[i];
                           s -= d * d;
                         }
                         return s / 2;
                       });
}

WorldFunction make_deformed(const WorldFunction& base, Deformation d, std::string name,
                            DeformationCheck check) {
  if (!d) throw ValidationError("deformation is empty");
  auto raw = [base, d](const Point& p, const Point& q) -> Real {
    const Real s = base(p, q);
    return s + d(s, p, q);
  };

  const Domain& dom = base.domain();
  auto check_pair = [&](const Point& p, const Point& q) {
    if (p == q) return;
    const Real pq = raw(p, q);
    const Real qp = raw(q, p);
    if (!std::isfinite(static_cast<double>(pq)) || !std::isfinite(static_cast<double>(qp)))
      throw ValidationError("deformation '" + name + "' is not finite at " + p.to_string() +
                            ", " + q.to_string());
    const Real scale = 1 + std::fabs(pq) + std::fabs(qp);
    if (std::fabs(pq - qp) > check.relative_tolerance * scale)
      throw ValidationError("deformation '" + name + "' is not symmetric at " + p.to_string() +
                            ", " + q.to_string());
  };

  if (dom.is_discrete() && dom.point_count <= 64) {
    for (std::size_t i = 0; i < dom.point_count; ++i)
      for (std::size_t j = i + 1; j < dom.point_count; ++j)
        check_pair(Point::discrete(i), Point::discrete(j));
  } else {
    std::mt19937_64 rng(check.seed);
    for (std::size_t k = 0; k < check.samples; ++k)
      check_pair(random_point(dom, rng), random_point(dom, rng));
  }

  return WorldFunction(std::move(name), dom, std::move(raw));
}

Deformation offset_deformation(Real lambda) {
  const Real offset = lambda * lambda / 2;
  return [offset](Real, const Point&, const Point&) { return offset; };
}

Deformation quadratic_stretch(Real alpha) {
  return [alpha](Real s, const Point&, const Point&) { return alpha * s * s; };
}

Deformation deformation_from_expression(const std::string& text, const Domain& base_domain) {
  std::vector<std::string> vars{"s"};
  if (base_domain.is_discrete()) {
    vars.push_back("i");
    vars.push_back("j");
  } else {
    for (std::size_t k = 0; k < base_domain.dimension; ++k) vars.push_back("x" + std::to_string(k));
    for (std::size_t k = 0; k < base_domain.dimension; ++k) vars.push_back("y" + std::to_string(k));
  }
  auto expr = std::make_shared<const Expression>(Expression::parse(text, vars));
  const std::size_t count = vars.size();
  return [expr, count](Real s, const Point& p, const Point& q) -> Real {
    boost::container::small_vector<Real, 16> values(count);
    values[0] = s;
    if (p.is_discrete()) {
      values[1] = static_cast<Real>(p.id());
      values[2] = static_cast<Real>(q.id());
    } else {
      const std::size_t n = p.arity();
      for (std::size_t k = 0; k < n; ++k) {
        values[1 + k] = p[k];
        values[1 + n + k] = q[k];
      }
    }
    return (*expr)(std::span<const Real>(values.data(), values.size()));
  };
}

WorldFunction make_tabulated(const std::vector<std::vector<double>>& table) {
  const std::size_t n = table.size();
  if (n == 0) throw ValidationError("σ table is empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].size() != n)
      throw ValidationError("σ table is not square: row " + std::to_string(i) + " has " +
                            std::to_string(table[i].size()) + " entries, expected " +
                            std::to_string(n));
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(table[i][j]))
        throw ValidationError("σ table entry (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") is not finite");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i][i] != 0.0)
      throw ValidationError("σ table diagonal entry " + std::to_string(i) + " is nonzero");
    for (std::size_t j = i + 1; j < n; ++j)
      if (table[i][j] != table[j][i])
        throw ValidationError("σ table is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
  }
  auto data = std::make_shared<const std::vector<std::vector<double>>>(table);
  return WorldFunction("tabulated", Domain::discrete(n), [data](const Point& p, const Point& q) {
    return static_cast<Real>((*data)[p.id()][q.id()]);
  });
}

std::vector<std::vector<double>> read_sigma_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open σ table '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError("σ table '" + path.string() + "' line " + std::to_string(line_no) +
                              ": bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace worldfn
