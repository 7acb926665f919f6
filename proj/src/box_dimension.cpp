#include "qsphere/generators.hpp"
#include "qsphere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace qsphere::gen {

namespace {

std::size_t count_boxes(const PointSet& s, const Point& corner, double size, const Point& offset) {
  std::vector<std::uint64_t> keys;
  keys.reserve(s.size());
  for (const auto& p : s.points) {
    std::uint64_t key = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const auto cell = static_cast<std::uint64_t>(std::floor((p(i) - corner(i) + offset(i)) / size));
      key = (key << 21) | (cell & 0x1fffff);
    }
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

BoxDimension box_dimension(const PointSet& s, double s_min, double s_max) {
  if (s.empty()) throw Error("empty set");
  if (!(s_min > 0 && s_min < s_max)) throw Error("box scales need 0 < s_min < s_max");
  if (std::log10(s_max / s_min) < 2 - 1e-12)
    throw Error("insufficient scale span: box counting needs two decades");
  if (geometry::median_spacing(s.points) > s_min)
    throw Error("insufficient scale span: samples are coarser than the smallest box");

  Point corner = s[0];
  for (const auto& p : s.points) corner = corner.cwiseMin(p);

  const int n = s.dim;
  std::vector<Point> offsets{Point::Zero(n)};
  for (int i = 0; i < n && offsets.size() < 4; ++i) offsets.push_back(0.5 * unit_vector(n, i));
  if (offsets.size() < 4) offsets.push_back(Point::Constant(n, 0.5));

  BoxDimension out;
  for (double size = s_max; size >= s_min * (1 - 1e-12); size *= 0.5) {
    double log_mean = 0.0;
    for (const auto& o : offsets)
      log_mean += std::log(static_cast<double>(count_boxes(s, corner, size, size * o)));
    out.scales.push_back(size);
    out.counts.push_back(std::exp(log_mean / static_cast<double>(offsets.size())));
  }

  const std::size_t m = out.scales.size();
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (std::size_t k = 0; k < m; ++k) {
    a(static_cast<Eigen::Index>(k), 0) = std::log(1 / out.scales[k]);
    a(static_cast<Eigen::Index>(k), 1) = 1.0;
    y(static_cast<Eigen::Index>(k)) = std::log(out.counts[k]);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  out.dimension = coef(0);
  out.residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(m));
  return out;
}

}  // namespace qsphere::gen
