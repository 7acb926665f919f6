#pragma once

#include "qsphere/maps.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace qsphere::maps {

struct BallRegion {
  Point center;
  double radius = 1.0;
};
/// A_t = {1 - t < |x| < 1 + t}.
struct AnnulusRegion {
  double t = 0.5;
};
using Region = std::variant<BallRegion, AnnulusRegion>;

struct DilatationEstimate {
  double K = 1.0;
  double K_tilde = 0.0;  // K - 1
  std::size_t sample_count = 0;
  Region region;
  Point argmax;  // sample attaining K
};

/// Both Jacobian quotients of the analytic definition at one point:
/// |f'|^n / |J| and |J| / l(f')^n, from the singular values.
std::pair<double, double> dilatation_quotients(const Mat& jac);

/// Maximum of the two quotients over Halton samples of the region. A lower
/// bound for the essential supremum; exact when the quotients are constant.
DilatationEstimate dilatation(const MapSpec& f, const Region& region,
                              std::size_t samples = 100000);

struct AnnulusPoint {
  double t = 0.0;
  double K_tilde = 0.0;
};

/// K~ on A_t for each t. Since A_s ⊂ A_t for s < t, the reported values are
/// made non-decreasing in t by a running maximum over the sorted list.
std::vector<AnnulusPoint> annulus_dilatation_profile(const MapSpec& f,
                                                     const std::vector<double>& t_list,
                                                     std::size_t samples = 100000);

}  // namespace qsphere::maps
