#include "qsphere/flatness.hpp"

#include "qsphere/geometry.hpp"
#include "qsphere/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>

namespace qsphere::flatness {

using geometry::KdTree;

Hyperplane Hyperplane::through(const Point& x, const Point& normal) {
  const double len = normal.norm();
  if (!(len > 0)) throw Error("hyperplane normal must be non-zero");
  Hyperplane h{normal / len, 0.0};
  h.offset = h.normal.dot(x);
  return h;
}

namespace {

constexpr double kTieTolerance = 1e-15;

Point canonical(Point nu) {
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (std::abs(nu(i)) > 1e-12) {
      if (nu(i) < 0) nu = -nu;
      break;
    }
  }
  return nu;
}

bool lex_less(const Point& a, const Point& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  Point normal;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value < b.value - kTieTolerance) return true;
  if (a.value > b.value + kTieTolerance) return false;
  return b.normal.size() == 0 || lex_less(canonical(a.normal), canonical(b.normal));
}

// S ∩ B(x, r) with the derived quantities every objective needs.
struct Restricted {
  int n = 2;
  Point x;
  double r = 0.0;
  std::vector<Point> pts;
  double spacing = 0.0;
  double disc_spacing = 0.0;
  std::unique_ptr<KdTree> tree;

  Restricted(const PointSet& s, const Point& center, double radius, const FlatnessOptions& opts)
      : n(s.dim), x(center), r(radius) {
    if (!(radius > 0)) throw Error("radius must be positive");
    if (center.size() != s.dim) throw Error("dimension mismatch");
    pts = geometry::restrict(s, center, radius).points;
    if (pts.empty()) throw Error("no points at this scale");
    spacing = geometry::median_spacing(pts);
    disc_spacing = opts.disc_spacing > 0
                       ? opts.disc_spacing
                       : std::clamp(spacing, r / opts.max_disc_resolution,
                                    r / opts.min_disc_resolution);
    if (n == 3) tree = std::make_unique<KdTree>(pts);
  }
};

// sup over s in [-rho, rho] of dist(c + s u, P) for planar P, exact. Along
// the segment the squared distance to p_i is (s - a_i)^2 + b_i^2; all these
// parabolas share their curvature, so their lower envelope is a sequence of
// pieces ordered by a_i and the maximum sits at a piece boundary.
double segment_sup_distance(const std::vector<Point>& pts, const Point& c, const Point& u,
                            const Point& nu, double rho) {
  struct Par {
    double a, b;
  };
  std::vector<Par> par;
  par.reserve(pts.size());
  for (const auto& p : pts) {
    const Point d = p - c;
    par.push_back({d.dot(u), std::abs(d.dot(nu))});
  }
  std::sort(par.begin(), par.end(),
            [](const Par& l, const Par& m) { return l.a < m.a || (l.a == m.a && l.b < m.b); });
  auto breakpoint = [](const Par& i, const Par& j) {
    return 0.5 * (i.a + j.a) + (j.b - i.b) * (j.b + i.b) / (2.0 * (j.a - i.a));
  };
  std::vector<Par> hull;
  hull.reserve(par.size());
  for (const auto& p : par) {
    if (!hull.empty() && hull.back().a == p.a) continue;  // larger b never nearest
    while (hull.size() >= 2 &&
           breakpoint(hull[hull.size() - 2], hull.back()) >= breakpoint(hull.back(), p))
      hull.pop_back();
    hull.push_back(p);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    double lo = k == 0 ? -rho : std::max(-rho, breakpoint(hull[k - 1], hull[k]));
    double hi = k + 1 == hull.size() ? rho : std::min(rho, breakpoint(hull[k], hull[k + 1]));
    if (lo > hi) continue;
    worst = std::max({worst, std::hypot(lo - hull[k].a, hull[k].b),
                      std::hypot(hi - hull[k].a, hull[k].b)});
  }
  return worst;
}

// sup over a mesh of the disc {c + s1 e1 + s2 e2 : |s| <= rho} of dist(., P).
double disc_sup_distance(const KdTree& tree, const Point& c, const std::vector<Point>& basis,
                         double rho, double h) {
  double worst = tree.nearest_distance(c);
  if (rho <= 0) return worst;
  const int steps = static_cast<int>(std::floor(rho / h));
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      const double s1 = i * h, s2 = j * h;
      if (s1 * s1 + s2 * s2 > rho * rho) continue;
      worst = std::max(worst, tree.nearest_distance(c + s1 * basis[0] + s2 * basis[1]));
    }
  }
  const int rim = std::max(8, static_cast<int>(std::ceil(2 * kPi * rho / h)));
  for (int k = 0; k < rim; ++k) {
    const double a = 2 * kPi * k / rim;
    worst = std::max(worst,
                     tree.nearest_distance(c + rho * (std::cos(a) * basis[0] + std::sin(a) * basis[1])));
  }
  return worst;
}

double plane_side_sup(const Restricted& rs, const Point& c, const Point& nu, double rho) {
  if (rs.n == 2) {
    const Point u = make_point({-nu(1), nu(0)});
    return segment_sup_distance(rs.pts, c, u, nu, rho);
  }
  return disc_sup_distance(*rs.tree, c, geometry::complement_basis(nu), rho, rs.disc_spacing);
}

// Two-sided objective for the plane through x with unit normal nu, unscaled.
double through_x_distance(const Restricted& rs, const Point& nu) {
  double set_side = 0.0;
  for (const auto& p : rs.pts) set_side = std::max(set_side, std::abs((p - rs.x).dot(nu)));
  return std::max(set_side, plane_side_sup(rs, rs.x, nu, rs.r));
}

Point pca_normal(const std::vector<Point>& pts) {
  const auto n = pts.front().size();
  Point mean = Point::Zero(n);
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat cov = Mat::Zero(n, n);
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  Point nu = es.eigenvectors().col(0);
  return nu.normalized();
}

Point normal_2d(double phi) { return make_point({std::cos(phi), std::sin(phi)}); }

// Pattern search over line angles. The objective is evaluated on normals.
Candidate minimize_2d(const std::function<double(const Point&)>& objective, const Point& seed,
                      const FlatnessOptions& opts) {
  const int g = std::max(8, opts.coarse_directions_2d);
  struct Start {
    double value, phi;
  };
  std::vector<Start> starts;
  starts.reserve(static_cast<std::size_t>(g) + 1);
  for (int k = 0; k < g; ++k) {
    const double phi = kPi * k / g;
    starts.push_back({objective(normal_2d(phi)), phi});
  }
  const double seed_phi = std::atan2(seed(1), seed(0));
  starts.push_back({objective(normal_2d(seed_phi)), seed_phi});
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Start& a, const Start& b) { return a.value < b.value; });

  const double grid = kPi / g;
  std::vector<double> chosen;
  Candidate best;
  for (const auto& st : starts) {
    if (static_cast<int>(chosen.size()) >= opts.refine_starts) break;
    bool near = false;
    for (double c : chosen) {
      double d = std::fmod(std::abs(c - st.phi), kPi);
      d = std::min(d, kPi - d);
      if (d < 2.5 * grid) near = true;
    }
    if (near) continue;
    chosen.push_back(st.phi);

    double phi = st.phi, val = st.value, step = grid;
    for (int iter = 0; iter < 100000 && step >= opts.angle_tolerance; ++iter) {
      const double vp = objective(normal_2d(phi + step));
      const double vm = objective(normal_2d(phi - step));
      if (vp < val && vp <= vm) {
        phi += step;
        val = vp;
      } else if (vm < val) {
        phi -= step;
        val = vm;
      } else {
        step *= 0.5;
      }
    }
    const Candidate c{val, canonical(normal_2d(phi))};
    if (better(c, best)) best = c;
  }
  return best;
}

Candidate minimize_3d(const std::function<double(const Point&)>& objective, const Point& seed,
                      const FlatnessOptions& opts) {
  const int g = std::max(16, opts.coarse_directions_3d);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Candidate> starts;
  starts.reserve(static_cast<std::size_t>(g) + 1);
  for (int k = 0; k < g; ++k) {
    const double z = (k + 0.5) / g;
    const double rho = std::sqrt(1 - z * z);
    const Point nu = make_point({rho * std::cos(k * golden), rho * std::sin(k * golden), z});
    starts.push_back({objective(nu), nu});
  }
  starts.push_back({objective(seed), seed});
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

  const double spread = std::sqrt(2 * kPi / g);
  const double tol = std::max(opts.angle_tolerance, 1e-10);
  std::vector<Point> chosen;
  Candidate best;
  for (const auto& st : starts) {
    if (static_cast<int>(chosen.size()) >= opts.refine_starts) break;
    bool near = false;
    for (const auto& c : chosen)
      if (std::acos(std::min(1.0, std::abs(c.dot(st.normal)))) < 1.5 * spread) near = true;
    if (near) continue;
    chosen.push_back(st.normal);

    Point nu = st.normal;
    double val = st.value, step = 0.5 * spread;
    for (int iter = 0; iter < 100000 && step >= tol; ++iter) {
      const auto basis = geometry::complement_basis(nu);
      Candidate local{val, nu};
      for (int k = 0; k < 8; ++k) {
        const double a = kPi * k / 4;
        const Point trial =
            (nu + step * (std::cos(a) * basis[0] + std::sin(a) * basis[1])).normalized();
        const double v = objective(trial);
        if (v < local.value) local = {v, trial};
      }
      if (local.value < val) {
        nu = local.normal;
        val = local.value;
      } else {
        step *= 0.5;
      }
    }
    const Candidate c{val, canonical(nu)};
    if (better(c, best)) best = c;
  }
  return best;
}

Candidate minimize(int n, const std::function<double(const Point&)>& objective, const Point& seed,
                   const FlatnessOptions& opts) {
  return n == 2 ? minimize_2d(objective, seed, opts) : minimize_3d(objective, seed, opts);
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Minimal width of a planar point set via rotating calipers on its hull.
double min_width_2d(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  if (pts.size() < 3) return 0.0;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  const std::size_t h = hull.size();
  if (h < 3) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 1;
  for (std::size_t i = 0; i < h; ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % h];
    const double len = (b - a).norm();
    if (len == 0) continue;
    auto dist = [&](std::size_t idx) { return std::abs(cross(a, b, hull[idx % h])) / len; };
    while (dist(j + 1) >= dist(j) && (j + 1) % h != i) ++j;
    best = std::min(best, dist(j));
  }
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace

double hyperplane_distance_profile(const PointSet& s, const Hyperplane& h, const Point& x, double r,
                                   const FlatnessOptions& opts) {
  const Restricted rs(s, x, r, opts);
  const Point nu = h.normal.normalized();
  const double d = h.signed_distance(x) / h.normal.norm();
  if (std::abs(d) > r) throw Error("hyperplane misses the ball");
  const Point c = x - d * nu;
  const double rho = std::sqrt(std::max(0.0, r * r - d * d));

  double set_side = 0.0;
  for (const auto& p : rs.pts) {
    const double height = (p - c).dot(nu);
    const double lateral = ((p - c) - height * nu).norm();
    const double dist =
        lateral <= rho ? std::abs(height) : std::hypot(height, lateral - rho);
    set_side = std::max(set_side, dist);
  }
  return std::max(set_side, plane_side_sup(rs, c, nu, rho)) / r;
}

FlatnessResult local_flatness(const PointSet& s, const Point& x, double r,
                              const FlatnessOptions& opts) {
  const Restricted rs(s, x, r, opts);
  const auto objective = [&](const Point& nu) { return through_x_distance(rs, nu); };
  const Candidate best = minimize(rs.n, objective, pca_normal(rs.pts), opts);
  FlatnessResult out;
  out.theta = std::clamp(best.value / r, 0.0, 1.0);
  out.plane = Hyperplane::through(x, best.normal);
  out.point_count = rs.pts.size();
  out.sample_spacing = rs.spacing;
  return out;
}

double jones_beta(const PointSet& s, const Point& x, double r, const FlatnessOptions& opts) {
  const Restricted rs(s, x, r, opts);
  if (rs.n == 2) return std::clamp(0.5 * min_width_2d(rs.pts) / r, 0.0, 1.0);
  const auto half_width = [&](const Point& nu) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : rs.pts) {
      const double v = (p - rs.x).dot(nu);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return 0.5 * (hi - lo);
  };
  const Candidate best = minimize(3, half_width, pca_normal(rs.pts), opts);
  return std::clamp(best.value / r, 0.0, 1.0);
}

std::vector<double> FlatnessProfile::sup_by_scale() const {
  std::vector<double> sup(scales.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : entries) {
    for (std::size_t k = 0; k < scales.size(); ++k) {
      if (scales[k] != e.scale) continue;
      sup[k] = std::isnan(sup[k]) ? e.theta : std::max(sup[k], e.theta);
    }
  }
  return sup;
}

bool FlatnessProfile::monotone_vanishing(double tol) const {
  const auto sup = sup_by_scale();
  double prev = std::numeric_limits<double>::infinity();
  for (double v : sup) {
    if (std::isnan(v)) continue;
    if (v > prev + tol) return false;
    prev = v;
  }
  return true;
}

std::optional<double> FlatnessProfile::reifenberg_radius(double delta) const {
  const auto sup = sup_by_scale();
  std::optional<double> radius;
  for (std::size_t k = scales.size(); k-- > 0;) {
    if (std::isnan(sup[k])) continue;
    if (sup[k] > delta) break;
    radius = scales[k];
  }
  return radius;
}

FlatnessProfile reifenberg_profile(const PointSet& s, const std::vector<Point>& centers,
                                   const std::vector<double>& scales, const FlatnessOptions& opts) {
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!(scales[k] > 0)) throw Error("scales must be positive");
    if (k > 0 && !(scales[k] < scales[k - 1])) throw Error("scales must be sorted descending");
  }
  const std::size_t total = centers.size() * scales.size();
  struct Slot {
    bool ok = false;
    FlatnessResult result;
    std::string reason;
  };
  std::vector<Slot> slots(total);
  parallel_for(total, [&](std::size_t i) {
    const std::size_t c = i / scales.size(), k = i % scales.size();
    try {
      slots[i].result = local_flatness(s, centers[c], scales[k], opts);
      slots[i].ok = true;
    } catch (const Error& e) {
      slots[i].reason = e.what();
    }
  });

  FlatnessProfile profile;
  profile.scales = scales;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t c = i / scales.size(), k = i % scales.size();
    if (slots[i].ok)
      profile.entries.push_back(
          {c, centers[c], scales[k], slots[i].result.theta, slots[i].result.plane.normal});
    else
      profile.missing.push_back({c, scales[k], slots[i].reason});
  }
  return profile;
}

}  // namespace qsphere::flatness
