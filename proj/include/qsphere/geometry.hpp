#pragma once

#include "qsphere/core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qsphere::geometry {

/// Static k-d tree over a borrowed span of points (dimension <= 3).
/// The span must outlive the tree.
class KdTree {
 public:
  explicit KdTree(std::span<const Point> points);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double nearest_distance(const Point& q) const;
  [[nodiscard]] std::size_t nearest_index(const Point& q) const;
  /// Nearest stored point other than the one at index `self`.
  [[nodiscard]] double nearest_other_distance(std::size_t self) const;

 private:
  struct Node {
    std::size_t begin, end;  // range into order_
    int axis;                // -1 for leaves
    double split;
    std::size_t left, right;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const Point& q, std::size_t skip, double& best_sq,
              std::size_t& best) const;

  std::span<const Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int dim_ = 0;
};

/// Two-sided Hausdorff distance between finite point sets.
double hausdorff_distance(const PointSet& a, const PointSet& b);

/// Points of `s` inside the closed ball B(x, r), order preserved.
PointSet restrict(const PointSet& s, const Point& x, double r);

/// Median nearest-neighbour spacing of the set (0 for fewer than 2 points).
double median_spacing(std::span<const Point> points);

/// Orthonormal basis of the orthogonal complement of unit vector `normal`.
std::vector<Point> complement_basis(const Point& normal);

/// Proper rotation R with R e1 = u (u unit). Identity when u == e1.
Mat rotation_taking_e1_to(const Point& u);

}  // namespace qsphere::geometry
