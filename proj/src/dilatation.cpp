#include "qsphere/dilatation.hpp"

#include "qsphere/parallel.hpp"
#include "qsphere/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsphere::maps {

std::pair<double, double> dilatation_quotients(const Mat& jac) {
  const int n = static_cast<int>(jac.rows());
  const double det = jac.determinant();
  if (!(std::abs(det) >= 1e-300)) throw Error("degenerate Jacobian");
  Eigen::JacobiSVD<Mat> svd(jac);
  const auto& s = svd.singularValues();
  const double big = s(0), small = s(n - 1);
  return {std::pow(big, n) / std::abs(det), std::abs(det) / std::pow(small, n)};
}

DilatationEstimate dilatation(const MapSpec& f, const Region& region, std::size_t samples) {
  if (samples < 1) throw Error("sample count must be positive");
  const int n = f.dim;
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion>) {
          if (!(r.radius > 0)) throw Error("ball radius must be positive");
          if (r.center.size() != n) throw Error("dimension mismatch between map and region");
        } else {
          if (!(r.t > 0 && r.t < 1)) throw Error("annulus parameter t must lie in (0, 1)");
        }
      },
      region);

  auto sample = [&](std::size_t k) -> Point {
    const Vec u = halton(k + 1, n);
    if (const auto* b = std::get_if<BallRegion>(&region)) return cube_to_ball(u, b->center, b->radius);
    return cube_to_annulus(u, std::get<AnnulusRegion>(region).t);
  };

  std::vector<double> value(samples);
  parallel_for(samples, [&](std::size_t k) {
    const auto [q1, q2] = dilatation_quotients(jacobian(f, sample(k)));
    value[k] = std::max(q1, q2);
  });
  const auto it = std::max_element(value.begin(), value.end());  // first maximum
  DilatationEstimate est;
  est.K = std::max(1.0, *it);
  est.K_tilde = est.K - 1.0;
  est.sample_count = samples;
  est.region = region;
  est.argmax = sample(static_cast<std::size_t>(it - value.begin()));
  return est;
}

std::vector<AnnulusPoint> annulus_dilatation_profile(const MapSpec& f,
                                                     const std::vector<double>& t_list,
                                                     std::size_t samples) {
  std::vector<std::size_t> order(t_list.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t_list[a] < t_list[b]; });
  std::vector<AnnulusPoint> out(t_list.size());
  double running = 0.0;
  for (std::size_t i : order) {
    const auto est = dilatation(f, AnnulusRegion{t_list[i]}, samples);
    running = std::max(running, est.K_tilde);
    out[i] = {t_list[i], running};
  }
  return out;
}

}  // namespace qsphere::maps
