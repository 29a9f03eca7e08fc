#include "worldfn/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace worldfn {

std::size_t Point::id() const {
  if (!is_discrete()) throw DomainError("point is continuous, not a discrete id");
  return std::get<DiscreteId>(repr_).value;
}

const Coords& Point::coords() const {
  if (is_discrete()) throw DomainError("point is a discrete id, not a coordinate tuple");
  return std::get<Coords>(repr_);
}

Coords& Point::coords() {
  if (is_discrete()) throw DomainError("point is a discrete id, not a coordinate tuple");
  return std::get<Coords>(repr_);
}

std::strong_ordering operator<=>(const Point& a, const Point& b) {
  if (a.is_discrete() != b.is_discrete())
    return a.is_discrete() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_discrete()) return a.id() <=> b.id();
  const auto& ca = a.coords();
  const auto& cb = b.coords();
  const std::size_t n = std::min(ca.size(), cb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (ca[i] < cb[i]) return std::strong_ordering::less;
    if (cb[i] < ca[i]) return std::strong_ordering::greater;
  }
  return ca.size() <=> cb.size();
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (is_discrete()) {
    os << "#" << id();
    return os.str();
  }
  os << "(";
  const auto& c = coords();
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
  os << ")";
  return os.str();
}

double distance(const Point& a, const Point& b) {
  if (a.is_discrete() || b.is_discrete()) {
    if (a.is_discrete() && b.is_discrete()) return a.id() == b.id() ? 0.0 : 1.0;
    throw DomainError("distance between a discrete and a continuous point");
  }
  const auto& ca = a.coords();
  const auto& cb = b.coords();
  if (ca.size() != cb.size()) throw DomainError("distance between points of different arity");
  double s = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) s += (ca[i] - cb[i]) * (ca[i] - cb[i]);
  return std::sqrt(s);
}

Box Box::cube(std::size_t n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

Box Box::around(const Point& center, double half_width) {
  Box b;
  for (double c : center.coords()) {
    b.lower.push_back(c - half_width);
    b.upper.push_back(c + half_width);
  }
  return b;
}

double Box::extent() const {
  double e = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) e = std::max(e, upper[i] - lower[i]);
  return e;
}

bool Box::contains(const Point& p, double slack) const {
  if (p.is_discrete() || p.arity() != dimension()) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (p[i] < lower[i] - slack || p[i] > upper[i] + slack) return false;
  return true;
}

bool Box::empty() const {
  if (lower.empty() || lower.size() != upper.size()) return true;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(upper[i] > lower[i])) return true;
  return false;
}

void Box::validate() const {
  if (lower.size() != upper.size()) throw ValidationError("box bounds have different arity");
  if (empty()) throw ValidationError("box is empty");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw ValidationError("box bounds must be finite");
}

Domain Domain::continuous(std::size_t n, Box box) {
  if (n == 0) throw ValidationError("chart dimension must be positive");
  if (box.dimension() != n) throw ValidationError("bounding box arity does not match dimension");
  Domain d;
  d.carrier = Carrier::continuous;
  d.dimension = n;
  d.box = std::move(box);
  return d;
}

Domain Domain::discrete(std::size_t count) {
  if (count == 0) throw ValidationError("discrete carrier set is empty");
  Domain d;
  d.carrier = Carrier::discrete;
  d.point_count = count;
  return d;
}

void Domain::check(const Point& p) const {
  if (is_discrete()) {
    if (!p.is_discrete()) throw DomainError("continuous point given to a discrete geometry");
    if (p.id() >= point_count)
      throw DomainError("point id " + std::to_string(p.id()) + " outside carrier set of size " +
                        std::to_string(point_count));
    return;
  }
  if (p.is_discrete()) throw DomainError("discrete point given to a continuous geometry");
  if (p.arity() != dimension)
    throw DomainError("point " + p.to_string() + " has arity " + std::to_string(p.arity()) +
                      ", geometry has dimension " + std::to_string(dimension));
}

WorldFunction::WorldFunction(std::string name, Domain domain, Kernel kernel)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      kernel_(std::make_shared<const Kernel>(std::move(kernel))) {
  if (!*kernel_) throw ValidationError("world function kernel is empty");
}

Real WorldFunction::operator()(const Point& p, const Point& q) const {
  domain_.check(p);
  domain_.check(q);
  const auto order = p <=> q;
  if (order == 0) return 0;
  return order < 0 ? (*kernel_)(p, q) : (*kernel_)(q, p);
}

}  // namespace worldfn
