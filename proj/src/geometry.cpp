#include "qsphere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qsphere {

void PointSet::validate() const {
  if (dim < 2 || dim > 3) throw Error("point set dimension must be 2 or 3");
  for (const auto& p : points) {
    if (p.size() != dim) throw Error("point dimension mismatch");
    if (!p.allFinite()) throw Error("non-finite coordinate");
  }
}

namespace geometry {

namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const Point> points) : points_(points) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    dim_ = static_cast<int>(points_.front().size());
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, -1, 0.0, 0, 0});
  if (end - begin <= kLeafSize) return id;

  Point lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi(axis) - lo(axis) == 0.0) return id;  // all coincident

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points_[a](axis) < points_[b](axis); });
  const double split = points_[order_[mid]](axis);
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::size_t node, const Point& q, std::size_t skip, double& best_sq,
                    std::size_t& best) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (std::size_t i = nd.begin; i < nd.end; ++i) {
      const std::size_t idx = order_[i];
      if (idx == skip) continue;
      const double d = (points_[idx] - q).squaredNorm();
      if (d < best_sq || (d == best_sq && idx < best)) {
        best_sq = d;
        best = idx;
      }
    }
    return;
  }
  const double diff = q(nd.axis) - nd.split;
  const std::size_t near = diff < 0 ? nd.left : nd.right;
  const std::size_t far = diff < 0 ? nd.right : nd.left;
  search(near, q, skip, best_sq, best);
  if (diff * diff <= best_sq) search(far, q, skip, best_sq, best);
}

std::size_t KdTree::nearest_index(const Point& q) const {
  if (points_.empty()) throw Error("empty set");
  double best_sq = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  search(0, q, std::numeric_limits<std::size_t>::max(), best_sq, best);
  return best;
}

double KdTree::nearest_other_distance(std::size_t self) const {
  if (points_.size() < 2) throw Error("need at least two points");
  double best_sq = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  search(0, points_[self], self, best_sq, best);
  return std::sqrt(best_sq);
}

double KdTree::nearest_distance(const Point& q) const {
  return (points_[nearest_index(q)] - q).norm();
}

namespace {

double directed_hausdorff(const PointSet& from, const KdTree& to) {
  double worst = 0.0;
  for (const auto& p : from.points) worst = std::max(worst, to.nearest_distance(p));
  return worst;
}

}  // namespace

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw Error("empty set");
  if (a.dim != b.dim) throw Error("dimension mismatch");
  const KdTree ta(a.points);
  const KdTree tb(b.points);
  return std::max(directed_hausdorff(a, tb), directed_hausdorff(b, ta));
}

PointSet restrict(const PointSet& s, const Point& x, double r) {
  if (!(r > 0)) throw Error("radius must be positive");
  PointSet out(s.dim, {}, s.label);
  const double r2 = r * r;
  for (const auto& p : s.points)
    if ((p - x).squaredNorm() <= r2) out.points.push_back(p);
  return out;
}

double median_spacing(std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  const KdTree tree(points);
  std::vector<double> nn(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) nn[i] = tree.nearest_other_distance(i);
  const auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
  std::nth_element(nn.begin(), mid, nn.end());
  return *mid;
}

std::vector<Point> complement_basis(const Point& normal) {
  const int n = static_cast<int>(normal.size());
  std::vector<Point> basis;
  if (n == 2) {
    basis.push_back(make_point({-normal(1), normal(0)}));
    return basis;
  }
  // Gram-Schmidt against the coordinate axis least aligned with the normal.
  int axis = 0;
  normal.cwiseAbs().minCoeff(&axis);
  Point a = unit_vector(n, axis);
  a -= a.dot(normal) * normal;
  a.normalize();
  Point b(3);
  b << normal(1) * a(2) - normal(2) * a(1), normal(2) * a(0) - normal(0) * a(2),
      normal(0) * a(1) - normal(1) * a(0);
  basis.push_back(a);
  basis.push_back(b.normalized());
  return basis;
}

Mat rotation_taking_e1_to(const Point& u) {
  const int n = static_cast<int>(u.size());
  const Point e1 = unit_vector(n, 0);
  Mat id = Mat::Identity(n, n);
  Point v = e1 - u;
  // 1 - u0 cancels when u is close to e1; for unit u it equals |u_tail|^2 / (1 + u0).
  const double tail = u.tail(n - 1).squaredNorm();
  if (u(0) > 0) v(0) = tail / (1 + u(0));
  if (tail == 0 && u(0) > 0) return id;
  // Householder reflection maps e1 to u; flipping the last axis (which fixes
  // e1) restores orientation. |e1 - u|^2 = 2 (1 - u0) for unit u.
  Mat h = id - (v * v.transpose()) / v(0);
  Mat d = id;
  d(n - 1, n - 1) = -1.0;
  return h * d;
}

}  // namespace geometry
}  // namespace qsphere
