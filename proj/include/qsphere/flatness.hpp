#pragma once

#include "qsphere/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qsphere::flatness {

/// Affine hyperplane {y : <normal, y> = offset} with unit normal.
struct Hyperplane {
  Point normal;
  double offset = 0.0;

  static Hyperplane through(const Point& x, const Point& normal);
  [[nodiscard]] double signed_distance(const Point& y) const { return normal.dot(y) - offset; }
};

struct FlatnessOptions {
  /// Spacing of the mesh on the plane disc in n = 3. Zero selects the median
  /// nearest-neighbour spacing of the restricted set, clamped to
  /// [r / max_disc_resolution, r / min_disc_resolution].
  double disc_spacing = 0.0;
  double min_disc_resolution = 8.0;
  double max_disc_resolution = 48.0;
  /// Coarse candidate normals evaluated before local refinement.
  int coarse_directions_2d = 360;
  int coarse_directions_3d = 192;
  /// Number of best coarse candidates refined by pattern search.
  int refine_starts = 4;
  /// Pattern search stops once the step (radians) drops below this.
  double angle_tolerance = 1e-12;
};

struct FlatnessResult {
  double theta = 0.0;
  Hyperplane plane;
  std::size_t point_count = 0;
  double sample_spacing = 0.0;  // median spacing of S ∩ B(x, r)
};

/// (1/r) HD[S ∩ B(x,r), H ∩ B(x,r)] for one candidate plane. The set-to-disc
/// side is exact. The disc-to-set side is exact in n = 2 (lower envelope of
/// the distance parabolas along the segment) and mesh-sampled in n = 3.
double hyperplane_distance_profile(const PointSet& s, const Hyperplane& h, const Point& x, double r,
                                   const FlatnessOptions& opts = {});

/// θ_S(x, r): minimum of the normalized two-sided distance over hyperplanes
/// through x, clamped to [0, 1]. Ties between equal values resolve to the
/// lexicographically smallest canonical normal (first significant coordinate
/// positive).
FlatnessResult local_flatness(const PointSet& s, const Point& x, double r,
                              const FlatnessOptions& opts = {});

/// Jones β: (1/r) inf over affine hyperplanes of sup_{p ∈ S∩B(x,r)} dist(p, H),
/// i.e. half the minimal width of the restricted set divided by r. Exact in
/// n = 2 (convex hull edges); numerical minimization over normals in n = 3.
double jones_beta(const PointSet& s, const Point& x, double r, const FlatnessOptions& opts = {});

struct FlatnessEntry {
  std::size_t center_index = 0;
  Point center;
  double scale = 0.0;
  double theta = 0.0;
  Point normal;
};

struct MissingEntry {
  std::size_t center_index = 0;
  double scale = 0.0;
  std::string reason;
};

struct FlatnessProfile {
  std::vector<FlatnessEntry> entries;
  std::vector<MissingEntry> missing;
  std::vector<double> scales;  // descending, as requested

  /// Largest θ among entries at each requested scale (NaN when none).
  [[nodiscard]] std::vector<double> sup_by_scale() const;
  /// True when sup θ never increases as the scale shrinks.
  [[nodiscard]] bool monotone_vanishing(double tol = 1e-12) const;
  /// Largest tabulated scale R such that every entry at scales <= R has
  /// θ <= delta; nullopt when even the smallest scale fails.
  [[nodiscard]] std::optional<double> reifenberg_radius(double delta) const;
};

/// θ at every (center, scale) pair. Entries whose restriction is empty are
/// recorded in `missing` instead of aborting.
FlatnessProfile reifenberg_profile(const PointSet& s, const std::vector<Point>& centers,
                                   const std::vector<double>& scales,
                                   const FlatnessOptions& opts = {});

}  // namespace qsphere::flatness
