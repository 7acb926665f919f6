#pragma once

#include "qsphere/dilatation.hpp"
#include "qsphere/maps.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace qsphere::qs {

using maps::MapSpec;

struct QsOptions {
  /// Local refinement of the best sampled triples (0 disables it).
  int refine_iterations = 100;
  double refine_decay = 0.7;
  int refine_starts = 8;
  /// Nested mode: triples are drawn in B(center, nested_radius) and only
  /// those inside the requested ball are kept, so a smaller ball always sees
  /// a subset of the triples of a larger one. Refinement is disabled.
  std::optional<double> nested_radius;
};

struct QsEstimate {
  double H = 1.0;
  double H_tilde = 0.0;
  std::array<Point, 3> witness;  // x, y, z with |x - y| <= |x - z|
  std::size_t triple_count = 0;  // triples drawn
  std::size_t used_count = 0;    // triples that entered the maximum
  std::uint64_t seed = 0;
};

/// Sampled lower bound for sup |f(x)-f(y)| / |f(x)-f(z)| over x, y, z in the
/// ball with |x - y| <= |x - z|. Deterministic given the seed.
QsEstimate weak_qs_constant(const MapSpec& f, const Point& center, double radius,
                            std::size_t triple_count, std::uint64_t seed,
                            const QsOptions& opts = {});

struct KhReport {
  double K = 1.0;
  double H = 1.0;
  double bound = 1.0;   // H^(n-1)
  double margin = 0.0;  // bound * (1 + tol) - K
  double tolerance = 0.05;
  bool pass = true;
};

/// K_f(ball) <= H_f(ball)^(n-1) * (1 + tol) with both sides estimated.
KhReport check_KH_inequality(const MapSpec& f, const maps::BallRegion& ball,
                             std::size_t dilatation_samples = 100000,
                             std::size_t triple_count = 200000, std::uint64_t seed = 1,
                             double tol = 0.05);

/// g = ψ ∘ f ∘ φ with φ(y) = center + r Q y and ψ(w) = P (w - f(center)) / s.
struct Standardization {
  MapSpec base;
  Point center;
  double radius = 1.0;
  Mat pre_rotation;   // Q, Q e1 = (pivot - center) / r
  Point pivot;
  Point image_center;  // f(center)
  double image_radius = 1.0;  // s = |f(pivot) - f(center)|
  Mat post_rotation;  // P, P (f(pivot) - f(center)) / s = e1
  MapSpec composed;   // g as a single composite MapSpec

  [[nodiscard]] Point pre(const Point& y) const;
  [[nodiscard]] Point post(const Point& w) const;
  [[nodiscard]] Point operator()(const Point& y) const;
};

/// Standardization of f on B(center, r): the pivot maximizes |f(x) - f(center)|
/// over |x - center| = r (sampled, then refined). Throws
/// "containment violated" when a check sphere finds |g| > 1 + 1e-6.
Standardization standardize(const MapSpec& f, const Point& center, double r,
                            std::size_t sphere_samples = 0);

/// max |g(x)| / min |g(y)| over sampled unit-sphere points.
double extremal_quotient(const MapSpec& g, std::size_t sphere_samples = 0);

}  // namespace qsphere::qs
