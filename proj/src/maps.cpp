#include "qsphere/maps.hpp"

#include <cmath>

namespace qsphere::maps {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const MapSpec& f, const Point& x) {
  if (x.size() != f.dim) throw Error("dimension mismatch between map and point");
}

// Radial maps x ↦ x g(ρ)/ρ with ρ = |x|.
struct RadialProfile {
  double g;   // g(ρ)
  double dg;  // g'(ρ)
};

RadialProfile radial_profile(const RadialStretch& s, double rho) {
  const double g = std::pow(rho, s.exponent);
  return {g, s.exponent * g / rho};
}

RadialProfile radial_profile(const RadialBlend& b, double rho) {
  double a = b.inner, da = 0.0;
  if (rho >= b.r_outer) {
    a = b.outer;
  } else if (rho > b.r_inner) {
    const double w = b.r_outer - b.r_inner;
    const double u = (rho - b.r_inner) / w;
    a = b.inner + (b.outer - b.inner) * u * u * (3 - 2 * u);
    da = (b.outer - b.inner) * 6 * u * (1 - u) / w;
  }
  const double lr = std::log(rho);
  const double g = std::exp(a * lr);
  return {g, g * (da * lr + a / rho)};
}

template <class R>
Point radial_eval(const R& r, const Point& x) {
  const double rho = x.norm();
  if (rho == 0) return x;
  return x * (radial_profile(r, rho).g / rho);
}

template <class R>
Mat radial_jacobian(const R& r, const Point& x) {
  const double rho = x.norm();
  if (rho == 0) throw Error("jacobian undefined at origin");
  const auto p = radial_profile(r, rho);
  const Point u = x / rho;
  const auto n = x.size();
  return (p.g / rho) * Mat::Identity(n, n) + (p.dg - p.g / rho) * (u * u.transpose());
}

}  // namespace

MapSpec MapSpec::identity(int n) { return {n, Identity{}}; }

MapSpec MapSpec::linear(const Mat& a) {
  MapSpec m{static_cast<int>(a.rows()), Linear{a}};
  m.validate();
  return m;
}

MapSpec MapSpec::radial_stretch(int n, double a) {
  MapSpec m{n, RadialStretch{a}};
  m.validate();
  return m;
}

MapSpec MapSpec::radial_blend(int n, double inner, double outer, double r_inner, double r_outer) {
  MapSpec m{n, RadialBlend{inner, outer, r_inner, r_outer}};
  m.validate();
  return m;
}

MapSpec MapSpec::translation(const Vec& v) { return {static_cast<int>(v.size()), Translation{v}}; }

MapSpec MapSpec::composite(std::vector<MapSpec> parts) {
  if (parts.empty()) throw Error("composite map needs at least one part");
  const int n = parts.front().dim;
  MapSpec m{n, Composite{std::move(parts)}};
  m.validate();
  return m;
}

std::string MapSpec::variant_name() const {
  return std::visit(Overloaded{[](const Identity&) { return "identity"; },
                               [](const Linear&) { return "linear"; },
                               [](const RadialStretch&) { return "radial_stretch"; },
                               [](const RadialBlend&) { return "radial_blend"; },
                               [](const Translation&) { return "translation"; },
                               [](const Composite&) { return "composite"; }},
                    kind);
}

void MapSpec::validate() const {
  if (dim < 2 || dim > 3) throw Error("map dimension must be 2 or 3");
  std::visit(Overloaded{
                 [](const Identity&) {},
                 [&](const Linear& l) {
                   if (l.matrix.rows() != dim || l.matrix.cols() != dim)
                     throw Error("linear map matrix has wrong shape");
                   if (!l.matrix.allFinite()) throw Error("linear map matrix is not finite");
                   if (std::abs(l.matrix.determinant()) <= 1e-12)
                     throw Error("linear map matrix is singular");
                 },
                 [](const RadialStretch& s) {
                   if (!(s.exponent > 0) || !std::isfinite(s.exponent))
                     throw Error("radial exponent must be positive");
                 },
                 [](const RadialBlend& b) {
                   if (!(b.inner > 0) || !(b.outer > 0))
                     throw Error("radial exponent must be positive");
                   if (!(b.r_inner > 0) || !(b.r_outer > b.r_inner))
                     throw Error("blend radii must satisfy 0 < r_inner < r_outer");
                 },
                 [&](const Translation& t) {
                   if (t.shift.size() != dim) throw Error("translation has wrong dimension");
                 },
                 [&](const Composite& c) {
                   if (c.parts.empty()) throw Error("composite map needs at least one part");
                   for (const auto& p : c.parts) {
                     if (p.dim != dim) throw Error("composite parts differ in dimension");
                     p.validate();
                   }
                 }},
             kind);
}

Point evaluate(const MapSpec& f, const Point& x) {
  check_dim(f, x);
  return std::visit(Overloaded{[&](const Identity&) -> Point { return x; },
                               [&](const Linear& l) -> Point { return l.matrix * x; },
                               [&](const RadialStretch& s) { return radial_eval(s, x); },
                               [&](const RadialBlend& b) { return radial_eval(b, x); },
                               [&](const Translation& t) -> Point { return x + t.shift; },
                               [&](const Composite& c) {
                                 Point y = x;
                                 for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it)
                                   y = evaluate(*it, y);
                                 return y;
                               }},
                    f.kind);
}

Mat jacobian(const MapSpec& f, const Point& x) {
  check_dim(f, x);
  const auto n = x.size();
  return std::visit(Overloaded{[&](const Identity&) -> Mat { return Mat::Identity(n, n); },
                               [&](const Linear& l) -> Mat { return l.matrix; },
                               [&](const RadialStretch& s) { return radial_jacobian(s, x); },
                               [&](const RadialBlend& b) { return radial_jacobian(b, x); },
                               [&](const Translation&) -> Mat { return Mat::Identity(n, n); },
                               [&](const Composite& c) {
                                 Point y = x;
                                 Mat j = Mat::Identity(n, n);
                                 for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it) {
                                   j = jacobian(*it, y) * j;
                                   y = evaluate(*it, y);
                                 }
                                 return j;
                               }},
                    f.kind);
}

Mat jacobian_fd(const MapSpec& f, const Point& x) {
  check_dim(f, x);
  const auto n = x.size();
  const double h = 1e-6 * std::max(1.0, x.norm());
  Mat j(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Point e = Point::Zero(n);
    e(k) = h;
    j.col(k) = (evaluate(f, x + e) - evaluate(f, x - e)) / (2 * h);
  }
  return j;
}

Mat rotation_2d(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

std::vector<NamedMap> builtin_maps() {
  std::vector<NamedMap> out;
  Mat d21(2, 2);
  d21 << 2, 0, 0, 1;
  Mat shear(2, 2);
  shear << 1, 0.5, 0, 1;
  Mat d3(3, 3);
  d3 << 1.2, 0, 0, 0, 1, 0, 0, 0, 0.9;
  Mat sim = 1.5 * rotation_2d(kPi / 5);

  out.push_back({"identity_2d", MapSpec::identity(2)});
  out.push_back({"diag_2_1", MapSpec::linear(d21)});
  out.push_back({"rotation_30deg", MapSpec::linear(rotation_2d(kPi / 6))});
  out.push_back({"shear_0.5", MapSpec::linear(shear)});
  out.push_back({"radial_0.5", MapSpec::radial_stretch(2, 0.5)});
  out.push_back({"radial_0.8", MapSpec::radial_stretch(2, 0.8)});
  out.push_back({"radial_1.25", MapSpec::radial_stretch(2, 1.25)});
  out.push_back({"similarity_diag_radial",
                 MapSpec::composite({MapSpec::translation(make_point({0.3, -0.2})),
                                     MapSpec::linear(sim), MapSpec::radial_stretch(2, 0.9)})});
  out.push_back({"radial_blend_0.8", MapSpec::radial_blend(2, 1.0, 0.8, 1.1, 1.5)});
  out.push_back({"identity_3d", MapSpec::identity(3)});
  out.push_back({"diag_1.2_1_0.9", MapSpec::linear(d3)});
  out.push_back({"radial3_0.9", MapSpec::radial_stretch(3, 0.9)});
  return out;
}

MapSpec builtin_map(const std::string& name) {
  for (auto& m : builtin_maps())
    if (m.name == name) return m.map;
  throw Error("unknown built-in map: " + name);
}

}  // namespace qsphere::maps
