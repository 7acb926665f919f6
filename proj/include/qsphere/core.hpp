#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace qsphere {

// Points live in R^2 or R^3; the fixed upper bound keeps them off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Point = Vec;

/// Raised for violated preconditions and numerical failures of the domain
/// operations. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "1.0.0";

inline constexpr double kPi = 3.14159265358979323846;

struct PointSet {
  int dim = 2;
  std::vector<Point> points;
  std::string label;

  PointSet() = default;
  explicit PointSet(int n, std::vector<Point> pts = {}, std::string lbl = {})
      : dim(n), points(std::move(pts)), label(std::move(lbl)) {}

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }

  /// Throws unless every point has dimension `dim` and finite coordinates.
  void validate() const;
};

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p(i++) = c;
  return p;
}

inline Point unit_vector(int n, int axis) {
  Point p = Point::Zero(n);
  p(axis) = 1.0;
  return p;
}

}  // namespace qsphere
