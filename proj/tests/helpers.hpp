#pragma once

#include "qsphere/core.hpp"

#include <cmath>
#include <random>

namespace testing {

using qsphere::make_point;
using qsphere::Point;
using qsphere::PointSet;

inline PointSet circle(std::size_t count, double radius = 1.0) {
  PointSet s(2);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = 2 * qsphere::kPi * static_cast<double>(k) / static_cast<double>(count);
    s.points.push_back(make_point({radius * std::cos(a), radius * std::sin(a)}));
  }
  return s;
}

// Samples of the segment {(s, height) : |s| <= half}.
inline PointSet horizontal_segment(std::size_t count, double half, double height = 0.0) {
  PointSet s(2);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = -half + 2 * half * static_cast<double>(k) / static_cast<double>(count - 1);
    s.points.push_back(make_point({x, height}));
  }
  return s;
}

inline PointSet random_set(std::mt19937_64& rng, int dim, std::size_t count, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  PointSet s(dim);
  for (std::size_t k = 0; k < count; ++k) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p(i) = u(rng);
    s.points.push_back(p);
  }
  return s;
}

// Haar-random rotation via QR with sign correction.
inline qsphere::Mat random_rotation(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < dim; ++i)
    if (r(i, i) < 0) q.col(i) *= -1;
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

inline PointSet transform(const PointSet& s, const qsphere::Mat& q, const Point& v, double lambda) {
  PointSet out(s.dim);
  for (const auto& p : s.points) out.points.push_back(lambda * (q * p + v));
  return out;
}

}  // namespace testing
