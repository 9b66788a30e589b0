#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hpl/point_cloud.hpp"

namespace hpl {

// Exact neighbor queries over an immutable point cloud. Linear scan per
// query: correct by construction and fast enough for the cloud sizes this
// library targets (a few thousand points). Safe to query from many threads.
class NeighborIndex {
 public:
  explicit NeighborIndex(PointCloud cloud) : cloud_(std::move(cloud)) {
    if (cloud_.empty())
      throw std::invalid_argument("NeighborIndex: empty cloud");
  }

  const PointCloud& cloud() const { return cloud_; }
  std::size_t size() const { return cloud_.size(); }
  int dim() const { return cloud_.dim(); }

  // Closed ball: {j : |x_center - x_j| <= radius}, ascending indices.
  // Membership is decided on squared distances.
  std::vector<int> query_ball(int center, double radius) const {
    check_center(center);
    if (radius < 0.0)
      throw std::invalid_argument("query_ball: radius must be >= 0");
    const double r2 = radius * radius;
    const std::size_t n = size();
    std::vector<int> out;
    for (std::size_t j = 0; j < n; ++j)
      if (squared_distance(cloud_, static_cast<std::size_t>(center), j) <= r2)
        out.push_back(static_cast<int>(j));
    return out;
  }

  // k nearest vertices to the center in Euclidean distance, the center itself
  // included (distance 0, always first). Remaining ties break toward the
  // smaller vertex index. Result length is exactly k.
  std::vector<int> query_knn(int center, int k) const {
    check_center(center);
    const std::size_t n = size();
    if (k < 1 || static_cast<std::size_t>(k) > n)
      throw std::invalid_argument("query_knn: k must be in [1, n]");
    std::vector<std::pair<double, int>> order(n);
    for (std::size_t j = 0; j < n; ++j)
      order[j] = {squared_distance(cloud_, static_cast<std::size_t>(center), j),
                  static_cast<int>(j)};
    auto less = [center](const std::pair<double, int>& a,
                         const std::pair<double, int>& b) {
      if (a.first != b.first) return a.first < b.first;
      if (a.second == center) return b.second != center;
      if (b.second == center) return false;
      return a.second < b.second;
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), less);
    std::sort(order.begin(), order.begin() + k, less);
    std::vector<int> out(k);
    for (int t = 0; t < k; ++t) out[t] = order[t].second;
    return out;
  }

 private:
  void check_center(int center) const {
    if (center < 0 || static_cast<std::size_t>(center) >= size())
      throw std::invalid_argument("neighbor query: center index " +
                                  std::to_string(center) + " out of range");
  }

  PointCloud cloud_;
};

}  // namespace hpl
