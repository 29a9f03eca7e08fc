#include "worldfn/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace worldfn {

namespace {
constexpr std::size_t kLeafSize = 12;

double dist2(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}
}  // namespace

PointIndex::PointIndex(const std::vector<Point>& points) : points_(points) {
  if (points_.empty()) return;
  dim_ = points_.front().arity();
  for (const auto& p : points_)
    if (p.is_discrete() || p.arity() != dim_)
      throw DomainError("spatial index needs continuous points of equal arity");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, points_.size(), 0);
}

std::size_t PointIndex::build(std::size_t begin, std::size_t end, int depth) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  // Split on the axis of largest spread.
  int axis = 0;
  double best = -1;
  for (std::size_t a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, points_[order_[i]][a]);
      hi = std::max(hi, points_[order_[i]][a]);
    }
    if (hi - lo > best) {
      best = hi - lo;
      axis = static_cast<int>(a);
    }
  }
  if (best <= 0) return id;  // all coincident
  (void)depth;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const std::size_t l = build(begin, mid, depth + 1);
  const std::size_t r = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

std::pair<std::size_t, double> PointIndex::nearest(const Point& q) const {
  auto k = knn(q, 1);
  if (k.empty()) return {size(), std::numeric_limits<double>::infinity()};
  return {k[0], std::sqrt(dist2(points_[k[0]], q))};
}

std::vector<std::size_t> PointIndex::within(const Point& q, double radius) const {
  std::vector<std::size_t> out;
  if (empty()) return out;
  const double r2 = radius * radius;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i)
        if (dist2(points_[order_[i]], q) <= r2) out.push_back(order_[i]);
      continue;
    }
    const double d = q[n.axis] - n.split;
    if (d - radius <= 0) stack.push_back(n.left);
    if (d + radius >= 0) stack.push_back(n.right);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> PointIndex::knn(const Point& q, std::size_t k) const {
  std::vector<std::size_t> out;
  if (empty() || k == 0) return out;
  // Max-heap of (distance², index); ties broken by index for determinism.
  std::priority_queue<std::pair<double, std::size_t>> heap;
  auto bound = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().first;
  };
  auto visit = [&](auto&& self, std::size_t id) -> void {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::pair<double, std::size_t> cand{dist2(points_[order_[i]], q), order_[i]};
        if (heap.size() < k) heap.push(cand);
        else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      return;
    }
    const double d = q[n.axis] - n.split;
    const std::size_t first = d < 0 ? n.left : n.right;
    const std::size_t second = d < 0 ? n.right : n.left;
    self(self, first);
    if (d * d <= bound()) self(self, second);
  };
  visit(visit, 0);
  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

}  // namespace worldfn
