#pragma once

#include "qsphere/core.hpp"
#include "qsphere/sampling.hpp"

#include <string>
#include <vector>

namespace qsphere::gen {

/// Per-generation bump angle θ_j (radians), j = 1, 2, ...
struct AngleSchedule {
  enum class Kind { constant, power, list };
  Kind kind = Kind::constant;
  double theta = 0.0;          // constant
  double c = 1.0, q = 1.0;     // power: c j^(-q)
  std::vector<double> angles;  // list: angles[j-1]; zero past the end
  int generations = 0;

  static AngleSchedule constant(double theta, int generations);
  static AngleSchedule power(double c, double q, int generations);
  static AngleSchedule list(std::vector<double> angles);
  /// Parses "const:60deg", "const:0.5", "power:c,q" or "list:a,b,c" (radians
  /// unless suffixed with deg).
  static AngleSchedule parse(const std::string& spec, int generations);

  [[nodiscard]] double angle(int j) const;
  /// Throws unless 0 <= θ_j < π/2 for j <= generations.
  void validate() const;
  [[nodiscard]] std::string describe() const;
};

/// Piece ratio p = 1 / (2 (1 + cos θ)); the four pieces chain exactly from
/// one endpoint to the other.
double piece_ratio(double theta);
/// Length factor 4p = 2 / (1 + cos θ).
double length_factor(double theta);

struct SnowflakeCurve {
  PointSet polyline;
  int generations = 0;
  AngleSchedule schedule;
  std::vector<double> length_factors;  // per generation
  bool closed = false;
  double initial_length = 1.0;

  /// Initial length times the product of the recorded factors.
  [[nodiscard]] double predicted_length() const;
};

/// Variable-angle Koch construction on the unit segment [(0,0), (1,0)]
/// (bumps to the left), or on an equilateral triangle with outward bumps
/// when `closed`.
SnowflakeCurve snowflake(const AngleSchedule& schedule, bool closed = false);

/// Sum of segment lengths (closing segment excluded; closed curves repeat
/// their first point at the end).
double polyline_length(const PointSet& s);

/// Product-formula length after each of generations 0..m (no polyline).
std::vector<double> predicted_lengths(const AngleSchedule& schedule, int m);

/// Measured length against the product formula; throws when they differ by
/// more than 1e-9 relative.
double checked_length(const SnowflakeCurve& c);

struct BoxDimension {
  double dimension = 0.0;
  double residual = 0.0;  // RMS of the least-squares fit
  std::vector<double> scales;
  std::vector<double> counts;  // mean box count over the anchor offsets
};

/// Least-squares slope of log N(s) against log(1/s) on the dyadic scales
/// s_max 2^-k >= s_min, boxes anchored at the bounding-box corner and
/// averaged over 4 offsets. The range must span at least two decades.
BoxDimension box_dimension(const PointSet& s, double s_min, double s_max);

}  // namespace qsphere::gen
