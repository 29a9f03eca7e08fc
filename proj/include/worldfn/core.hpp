#pragma once

// Carrier-set points, the world-function contract and the error types shared
// by every other module.

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace worldfn {

// σ-level quantities are carried in extended precision. In flat geometries the
// equivalence and collinearity systems have double roots, so the attainable
// accuracy of a solution is the square root of the residual accuracy.
using Real = long double;

using Coords = boost::container::small_vector<double, 6>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside the carrier set or of the wrong arity.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An operation needed √(2σ) or a non-negative Gram determinant and got σ < 0.
class IndefiniteError : public Error {
 public:
  using Error::Error;
};

// Degenerate input: coincident points where distinct ones are required,
// singular basis, singular metric.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, asymmetric table, failed sampling validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical solver did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

struct DiscreteId {
  std::size_t value = 0;
  auto operator<=>(const DiscreteId&) const = default;
};

// A location in a carrier set: chart coordinates or an index into a finite set.
class Point {
 public:
  Point() = default;
  explicit Point(Coords coords) : repr_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : repr_(Coords(coords)) {}
  template <typename Range>
  static Point from_range(const Range& values) {
    Coords c;
    for (double v : values) c.push_back(v);
    return Point(std::move(c));
  }
  static Point discrete(std::size_t id) {
    Point p;
    p.repr_ = DiscreteId{id};
    return p;
  }

  bool is_discrete() const { return std::holds_alternative<DiscreteId>(repr_); }
  std::size_t id() const;
  const Coords& coords() const;
  Coords& coords();
  // Number of chart coordinates; 0 for discrete points.
  std::size_t arity() const {
    return is_discrete() ? 0 : std::get<Coords>(repr_).size();
  }
  double operator[](std::size_t i) const { return coords()[i]; }

  friend bool operator==(const Point& a, const Point& b) { return a.repr_ == b.repr_; }
  // Lexicographic on coordinates; discrete points order before continuous ones.
  friend std::strong_ordering operator<=>(const Point& a, const Point& b);

  std::string to_string() const;

 private:
  std::variant<Coords, DiscreteId> repr_;
};

double distance(const Point& a, const Point& b);  // chart-Euclidean

// Axis-aligned region of a chart.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box cube(std::size_t n, double lo, double hi);
  static Box around(const Point& center, double half_width);

  std::size_t dimension() const { return lower.size(); }
  double extent() const;  // longest side
  bool contains(const Point& p, double slack = 0.0) const;
  bool empty() const;
  void validate() const;
};

enum class Carrier { continuous, discrete };

// What a solver or sampler needs to know about the carrier set.
struct Domain {
  Carrier carrier = Carrier::continuous;
  std::size_t dimension = 0;    // chart arity (continuous)
  std::size_t point_count = 0;  // size of the set (discrete)
  Box box;                      // default sampling region (continuous)

  static Domain continuous(std::size_t n, Box box);
  static Domain discrete(std::size_t count);
  bool is_discrete() const { return carrier == Carrier::discrete; }
  void check(const Point& p) const;
};

// The defining object of a geometry: a symmetric real function on point pairs
// that vanishes on the diagonal. Evaluation is pure; copies share the kernel.
class WorldFunction {
 public:
  using Kernel = std::function<Real(const Point&, const Point&)>;

  WorldFunction(std::string name, Domain domain, Kernel kernel);

  // σ(P, Q). The kernel is always called with the pair in canonical order, so
  // symmetry holds bit-for-bit; σ(P, P) is exactly 0.
  Real operator()(const Point& p, const Point& q) const;

  // The kernel as supplied, without ordering or diagonal handling. Used to
  // validate user deformations.
  Real raw(const Point& p, const Point& q) const { return (*kernel_)(p, q); }

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  std::size_t dimension() const { return domain_.dimension; }

 private:
  std::string name_;
  Domain domain_;
  std::shared_ptr<const Kernel> kernel_;
};

inline Real world_function(const WorldFunction& g, const Point& p, const Point& q) {
  return g(p, q);
}

// The ordered pair (origin, tip), written PQ in the text.
struct PointPairVector {
  Point origin;
  Point tip;

  friend bool operator==(const PointPairVector&, const PointPairVector&) = default;
};

}  // namespace worldfn
