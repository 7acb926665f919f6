#include "qsphere/quasisymmetry.hpp"

#include "qsphere/geometry.hpp"
#include "qsphere/parallel.hpp"
#include "qsphere/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsphere::qs {

namespace {

constexpr std::size_t kBlock = 4096;

struct Triple {
  double value = -1.0;
  std::size_t index = std::numeric_limits<std::size_t>::max();
  std::array<Point, 3> p;
};

bool beats(const Triple& a, const Triple& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

// Ratio for an admissible triple, or a negative value when it is skipped.
double ratio(const MapSpec& f, const Point& x, const Point& y, const Point& z, double min_gap) {
  if ((x - z).norm() < min_gap) return -1.0;
  const Point fx = evaluate(f, x);
  const double den = (fx - evaluate(f, z)).norm();
  if (!(den >= 1e-300)) return -1.0;
  return (fx - evaluate(f, y)).norm() / den;
}

// Pulls y towards x until |x - y| <= |x - z|.
void enforce_order(const Point& x, Point& y, const Point& z) {
  const double dy = (y - x).norm(), dz = (z - x).norm();
  if (dy > dz && dy > 0) y = x + (y - x) * (dz / dy);
}

Triple refine(const MapSpec& f, Triple t, const Point& center, double radius, const QsOptions& opts,
              std::mt19937_64 rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double min_gap = 1e-9 * radius;
  const double r2 = radius * radius;
  double step = 0.1 * radius;
  auto inside = [&](const Point& p) { return (p - center).squaredNorm() <= r2; };
  for (int it = 0; it < opts.refine_iterations; ++it) {
    Triple best = t;
    for (int k = 0; k < 9; ++k) {
      std::array<Point, 3> q = t.p;
      if (k < 8) {
        for (auto& p : q)
          for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += step * u(rng);
      } else {
        // Push y out to the constraint sphere |x - y| = |x - z|.
        const double dy = (q[1] - q[0]).norm();
        if (dy == 0) continue;
        q[1] = q[0] + (q[1] - q[0]) * ((q[2] - q[0]).norm() / dy);
      }
      enforce_order(q[0], q[1], q[2]);
      if (!inside(q[0]) || !inside(q[1]) || !inside(q[2])) continue;
      const double v = ratio(f, q[0], q[1], q[2], min_gap);
      if (v > best.value) best = {v, t.index, q};
    }
    if (best.value > t.value)
      t = best;
    else
      step *= opts.refine_decay;
  }
  return t;
}

}  // namespace

QsEstimate weak_qs_constant(const MapSpec& f, const Point& center, double radius,
                            std::size_t triple_count, std::uint64_t seed, const QsOptions& opts) {
  if (!(radius > 0)) throw Error("radius must be positive");
  if (triple_count < 1) throw Error("triple count must be positive");
  if (center.size() != f.dim) throw Error("dimension mismatch between map and ball");
  const double outer = opts.nested_radius.value_or(radius);
  if (opts.nested_radius && !(outer >= radius)) throw Error("nested radius must cover the ball");
  const double min_gap = 1e-9 * radius;
  const double r2 = radius * radius;

  const std::size_t blocks = (triple_count + kBlock - 1) / kBlock;
  std::vector<Triple> best(blocks);
  std::vector<std::size_t> used(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    auto rng = block_engine(seed, b);
    const std::size_t begin = b * kBlock, end = std::min(triple_count, begin + kBlock);
    for (std::size_t i = begin; i < end; ++i) {
      Point x = uniform_in_ball(rng, center, outer);
      Point y = uniform_in_ball(rng, center, outer);
      Point z = uniform_in_ball(rng, center, outer);
      if (opts.nested_radius && ((x - center).squaredNorm() > r2 ||
                                 (y - center).squaredNorm() > r2 || (z - center).squaredNorm() > r2))
        continue;
      if ((x - y).squaredNorm() > (x - z).squaredNorm()) std::swap(y, z);
      const double v = ratio(f, x, y, z, min_gap);
      if (v < 0) continue;
      ++used[b];
      const Triple t{v, i, {x, y, z}};
      if (beats(t, best[b])) best[b] = t;
    }
  });

  std::size_t used_total = 0;
  for (auto u : used) used_total += u;
  if (used_total == 0) throw Error("all triples skipped");

  std::vector<Triple> ranked;
  for (const auto& t : best)
    if (t.value >= 0) ranked.push_back(t);
  std::sort(ranked.begin(), ranked.end(), beats);
  Triple top = ranked.front();

  if (!opts.nested_radius && opts.refine_iterations > 0) {
    const std::size_t starts = std::min<std::size_t>(ranked.size(), std::max(1, opts.refine_starts));
    std::vector<Triple> refined(starts);
    parallel_for(starts, [&](std::size_t s) {
      refined[s] = refine(f, ranked[s], center, radius, opts,
                          block_engine(seed ^ 0x9e3779b97f4a7c15ULL, s));
    });
    for (const auto& t : refined)
      if (t.value > top.value) top = t;
  }

  QsEstimate est;
  est.H = std::max(1.0, top.value);
  est.H_tilde = est.H - 1.0;
  est.witness = top.p;
  est.triple_count = triple_count;
  est.used_count = used_total;
  est.seed = seed;
  return est;
}

KhReport check_KH_inequality(const MapSpec& f, const maps::BallRegion& ball,
                             std::size_t dilatation_samples, std::size_t triple_count,
                             std::uint64_t seed, double tol) {
  KhReport r;
  r.K = maps::dilatation(f, ball, dilatation_samples).K;
  r.H = weak_qs_constant(f, ball.center, ball.radius, triple_count, seed).H;
  r.bound = std::pow(r.H, f.dim - 1);
  r.tolerance = tol;
  r.margin = r.bound * (1 + tol) - r.K;
  r.pass = r.margin >= 0;
  return r;
}

Point Standardization::pre(const Point& y) const { return center + radius * (pre_rotation * y); }

Point Standardization::post(const Point& w) const {
  return post_rotation * (w - image_center) / image_radius;
}

Point Standardization::operator()(const Point& y) const { return post(evaluate(base, pre(y))); }

namespace {

std::size_t default_sphere_samples(int n) { return n == 2 ? 4096 : 16384; }

}  // namespace

Standardization standardize(const MapSpec& f, const Point& center, double r,
                            std::size_t sphere_samples) {
  if (!(r > 0)) throw Error("radius must be positive");
  const int n = f.dim;
  if (center.size() != n) throw Error("dimension mismatch between map and ball");
  if (sphere_samples == 0) sphere_samples = default_sphere_samples(n);

  const Point fc = evaluate(f, center);
  auto reach = [&](const Point& u) { return (evaluate(f, center + r * u) - fc).norm(); };

  const PointSet sphere = sphere_sampler(n, sphere_samples);
  std::vector<double> d(sphere.size());
  parallel_for(sphere.size(), [&](std::size_t k) { d[k] = reach(sphere[k]); });
  const auto best_it = std::max_element(d.begin(), d.end());
  Point u = sphere[static_cast<std::size_t>(best_it - d.begin())];
  double best = *best_it;

  // Local refinement of the pivot direction.
  if (n == 2) {
    double phi = std::atan2(u(1), u(0));
    double step = 2 * kPi / static_cast<double>(sphere_samples);
    while (step > 1e-13) {
      bool moved = false;
      for (double s : {step, -step}) {
        const Point cand = make_point({std::cos(phi + s), std::sin(phi + s)});
        const double v = reach(cand);
        if (v > best) {
          best = v;
          phi += s;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    u = make_point({std::cos(phi), std::sin(phi)});
  } else {
    double step = std::sqrt(4 * kPi / static_cast<double>(sphere_samples));
    while (step > 1e-12) {
      const auto basis = geometry::complement_basis(u);
      bool moved = false;
      for (int k = 0; k < 8 && !moved; ++k) {
        const double a = kPi * k / 4;
        const Point cand = (u + step * (std::cos(a) * basis[0] + std::sin(a) * basis[1])).normalized();
        const double v = reach(cand);
        if (v > best) {
          best = v;
          u = cand;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
  }
  if (!(best > 0)) throw Error("map collapses the sphere onto its center");

  Standardization s;
  s.base = f;
  s.center = center;
  s.radius = r;
  s.pre_rotation = geometry::rotation_taking_e1_to(u);
  s.pivot = center + r * u;
  s.image_center = fc;
  const Point w = evaluate(f, s.pivot) - fc;
  s.image_radius = w.norm();
  s.post_rotation = geometry::rotation_taking_e1_to(w / s.image_radius).transpose();
  s.composed = MapSpec::composite({MapSpec::linear(s.post_rotation / s.image_radius),
                                   MapSpec::translation(-fc), f, MapSpec::translation(center),
                                   MapSpec::linear(r * s.pre_rotation)});

  const Point e1 = unit_vector(n, 0);
  if (s(Point::Zero(n)).norm() > 1e-9 || (s(e1) - e1).norm() > 1e-9)
    throw Error("standardization does not fix 0 and e1");
  const PointSet check = sphere_sampler(n, sphere_samples + 1, 7);
  for (const auto& y : check.points)
    if (s(y).norm() > 1 + 1e-6) throw Error("containment violated");
  return s;
}

double extremal_quotient(const MapSpec& g, std::size_t sphere_samples) {
  if (sphere_samples == 0) sphere_samples = default_sphere_samples(g.dim);
  const PointSet sphere = sphere_sampler(g.dim, sphere_samples);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& y : sphere.points) {
    const double v = evaluate(g, y).norm();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo >= 1e-300)) throw Error("map vanishes on the unit sphere");
  return hi / lo;
}

}  // namespace qsphere::qs
