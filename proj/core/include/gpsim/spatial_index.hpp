#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gpsim/mesh.hpp"

namespace gpsim {

// Exact nearest-neighbour queries over a fixed point set.
//
// Among equidistant points the one with the smallest index wins, so results
// match a linear scan that keeps the first minimum.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  // Index of the nearest point; the tree must be non-empty.
  std::uint32_t nearest(const Vec3& query) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    std::uint32_t begin;  // range into order_
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, double& best_d2, std::uint32_t& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

// Squared distance computed in a fixed component order; every nearest
// neighbour comparison in the library goes through this.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace gpsim
