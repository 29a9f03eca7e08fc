#pragma once

// Static k-d tree over continuous points, chart-Euclidean metric.

#include "worldfn/core.hpp"

#include <utility>
#include <vector>

namespace worldfn {

class PointIndex {
 public:
  PointIndex() = default;
  explicit PointIndex(const std::vector<Point>& points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // (index, distance) of the nearest point. Index is size() when empty.
  std::pair<std::size_t, double> nearest(const Point& q) const;
  // Indices of all points within `radius` of q, ascending.
  std::vector<std::size_t> within(const Point& q, double radius) const;
  // The k nearest, closest first.
  std::vector<std::size_t> knn(const Point& q, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    int axis = -1;           // -1: leaf
    double split = 0;
    std::size_t left = 0, right = 0;
  };
  std::size_t build(std::size_t begin, std::size_t end, int depth);

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t dim_ = 0;
};

}  // namespace worldfn
