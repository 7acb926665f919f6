#pragma once

#include "qsphere/core.hpp"

#include <string>
#include <variant>
#include <vector>

namespace qsphere::maps {

struct MapSpec;

struct Identity {};
struct Linear {
  Mat matrix;
};
/// x ↦ x |x|^(a-1)
struct RadialStretch {
  double exponent = 1.0;
};
/// x ↦ x |x|^(a(|x|)-1) with a smoothstep exponent profile going from
/// `inner` (|x| <= r_inner) to `outer` (|x| >= r_outer).
struct RadialBlend {
  double inner = 1.0;
  double outer = 1.0;
  double r_inner = 1.0;
  double r_outer = 2.0;
};
struct Translation {
  Vec shift;
};
/// parts[0] ∘ parts[1] ∘ ... (the last part is applied first).
struct Composite {
  std::vector<MapSpec> parts;
};

using MapVariant = std::variant<Identity, Linear, RadialStretch, RadialBlend, Translation, Composite>;

struct MapSpec {
  int dim = 2;
  MapVariant kind;

  static MapSpec identity(int n);
  static MapSpec linear(const Mat& a);
  static MapSpec radial_stretch(int n, double a);
  static MapSpec radial_blend(int n, double inner, double outer, double r_inner, double r_outer);
  static MapSpec translation(const Vec& v);
  static MapSpec composite(std::vector<MapSpec> parts);

  [[nodiscard]] std::string variant_name() const;
  /// Throws on singular matrices, bad exponents, empty composites and
  /// dimension mismatches.
  void validate() const;
};

Point evaluate(const MapSpec& f, const Point& x);

/// Closed-form Jacobian; composites by the chain rule. Radial variants throw
/// "jacobian undefined at origin" at x = 0.
Mat jacobian(const MapSpec& f, const Point& x);

/// Central differences with step 1e-6 * max(1, |x|).
Mat jacobian_fd(const MapSpec& f, const Point& x);

struct NamedMap {
  std::string name;
  MapSpec map;
};

/// The twelve built-in test maps (planar and spatial).
std::vector<NamedMap> builtin_maps();
/// Lookup by name; throws for unknown names.
MapSpec builtin_map(const std::string& name);

Mat rotation_2d(double angle);

}  // namespace qsphere::maps
