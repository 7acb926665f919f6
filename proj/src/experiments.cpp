#include "qsphere/experiments.hpp"

#include "qsphere/dilatation.hpp"
#include "qsphere/flatness.hpp"
#include "qsphere/geometry.hpp"
#include "qsphere/parallel.hpp"
#include "qsphere/quasisymmetry.hpp"
#include "qsphere/sampling.hpp"
#include "qsphere/special_functions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

namespace qsphere::experiments {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kEpsilonMax = 1.0 / 20.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Json array_of(const std::vector<double>& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(io::number(x));
  return j;
}

double floor_small(double v) { return v < kRoundingFloor ? 0.0 : v; }

PointSet image_of(const MapSpec& f, const PointSet& s) {
  std::vector<Point> out(s.size());
  parallel_for(s.size(), [&](std::size_t i) { out[i] = maps::evaluate(f, s[i]); });
  return PointSet(f.dim, std::move(out), "image");
}

double condition_number(const Mat& a) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

double winding_number(const std::vector<Point>& loop, const Point& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point a = loop[i] - c;
    const Point b = loop[(i + 1) % loop.size()] - c;
    total += std::atan2(a(0) * b(1) - a(1) * b(0), a.dot(b));
  }
  return total / (2 * kPi);
}

double closed_polygon_length(const PointSet& s) {
  return gen::polyline_length(s) + (s.points.back() - s.points.front()).norm();
}

// Cheaper search for the many small flatness evaluations of the sweeps.
flatness::FlatnessOptions sweep_flatness_options() {
  flatness::FlatnessOptions fo;
  fo.coarse_directions_2d = 90;
  fo.coarse_directions_3d = 96;
  fo.refine_starts = 2;
  return fo;
}

// Image of the arc of S^1 around angle `zeta` that covers B(f(z), t), with
// `count` points evenly spaced in angle. Sampling each ball separately keeps
// the gap term spacing/(2t) small at every scale.
PointSet local_arc_image(const MapSpec& f, double zeta, double t, std::size_t count) {
  auto at = [&](double a) { return maps::evaluate(f, make_point({std::cos(a), std::sin(a)})); };
  const Point c = at(zeta);
  auto outside = [&](double w) { return (at(zeta + w) - c).norm() > t && (at(zeta - w) - c).norm() > t; };
  double hi = t;
  while (hi < kPi && !outside(hi)) hi *= 2;
  double w = kPi;
  if (hi < kPi) {
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (outside(mid) ? hi : lo) = mid;
    }
    w = std::min(kPi, 1.05 * hi);
  }
  std::vector<Point> pts(count);
  for (std::size_t i = 0; i < count; ++i)
    pts[i] = at(zeta - w + 2 * w * static_cast<double>(i) / static_cast<double>(count - 1));
  return PointSet(2, std::move(pts), "arc");
}

std::size_t arc_sample_count(double t) {
  return std::max<std::size_t>(2000, static_cast<std::size_t>(std::ceil(10.0 / t)));
}

struct ThetaTable {
  std::vector<double> sup;      // per scale
  std::vector<double> spacing;  // worst sample spacing per scale
};

// sup over centers of θ_{f(S^{n-1})}(f(z), t). Planar curves are resampled per
// ball; surfaces use one global sample.
ThetaTable sup_theta(const MapSpec& f, const std::vector<Point>& centers,
                     const std::vector<double>& scales, std::size_t surface_samples) {
  const std::size_t nc = centers.size(), ns = scales.size();
  ThetaTable out{std::vector<double>(ns, 0.0), std::vector<double>(ns, 0.0)};
  const auto fo = sweep_flatness_options();
  std::vector<double> theta(nc * ns), spacing(nc * ns);
  if (f.dim == 2) {
    parallel_for(nc * ns, [&](std::size_t i) {
      const Point& z = centers[i / ns];
      const double t = scales[i % ns];
      const PointSet arc = local_arc_image(f, std::atan2(z(1), z(0)), t, arc_sample_count(t));
      const auto r = flatness::local_flatness(arc, maps::evaluate(f, z), t, fo);
      theta[i] = r.theta;
      spacing[i] = r.sample_spacing;
    });
  } else {
    const PointSet image = image_of(f, sphere_sampler(f.dim, surface_samples));
    const double h = geometry::median_spacing(image.points);
    parallel_for(nc * ns, [&](std::size_t i) {
      const auto r = flatness::local_flatness(image, maps::evaluate(f, centers[i / ns]), scales[i % ns], fo);
      theta[i] = r.theta;
      spacing[i] = h;
    });
  }
  for (std::size_t i = 0; i < nc * ns; ++i) {
    out.sup[i % ns] = std::max(out.sup[i % ns], theta[i]);
    out.spacing[i % ns] = std::max(out.spacing[i % ns], spacing[i]);
  }
  return out;
}

double sup_H_tilde(const MapSpec& f, const std::vector<Point>& centers, double r, std::size_t triples,
                   std::uint64_t seed) {
  double best = 0.0;
  for (const auto& z : centers) best = std::max(best, qs::weak_qs_constant(f, z, r, triples, seed).H_tilde);
  return floor_small(best);
}

std::vector<double> default_scales() {
  std::vector<double> s;
  for (int k = 12; k >= 2; --k) s.push_back(std::pow(10.0, -k / 4.0));
  return s;
}

Status combine(bool ok, bool decided) {
  if (!decided) return Status::inconclusive;
  return ok ? Status::pass : Status::fail;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::not_applicable: return "not applicable";
    case Status::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Json ExperimentReport::to_json(bool with_header) const {
  Json j;
  if (with_header) j["header"] = {{"tool", "qsphere"}, {"version", kVersion}, {"runtime_seconds", runtime_seconds}};
  j["name"] = name;
  j["inputs"] = inputs;
  j["measured"] = measured;
  j["bound"] = bound;
  j["status"] = experiments::to_string(status);
  j["margin"] = io::number(margin);
  j["note"] = note;
  return j;
}

ExperimentReport lemma_flat_check(const MapSpec& f, double epsilon, const LemmaOptions& opts) {
  const auto start = Clock::now();
  f.validate();
  const int n = f.dim;
  ExperimentReport rep;
  rep.name = "lemma_flat_check";
  rep.inputs = {{"map", io::map_to_json(f)},
                {"epsilon", epsilon},
                {"closed_form_H", opts.closed_form_H},
                {"line_extent", opts.line_extent}};
  rep.bound = {{"containment_radius", 5.0 / 6.0}, {"theta_bound", 20 * epsilon}};
  auto done = [&](Status s, std::string note) {
    rep.status = s;
    rep.note = std::move(note);
    rep.runtime_seconds = seconds_since(start);
    return rep;
  };

  if (!(epsilon >= 0 && epsilon <= kEpsilonMax)) return done(Status::not_applicable, "epsilon outside [0, 1/20]");
  if (opts.closed_form_H > 1 + epsilon + 1e-12)
    return done(Status::not_applicable, "closed-form H exceeds 1 + epsilon");
  const Point e1 = unit_vector(n, 0);
  const double fix_error =
      std::max((maps::evaluate(f, e1) - e1).norm(), (maps::evaluate(f, Point(-e1)) + e1).norm());
  rep.measured["normalization_error"] = fix_error;
  if (fix_error > 1e-9) return done(Status::not_applicable, "f does not fix +-e1");

  const Point f0 = maps::evaluate(f, Point::Zero(n));
  const std::size_t m = opts.sphere_samples ? opts.sphere_samples : (n == 2 ? 4096 : 10000);
  const PointSet image = image_of(f, sphere_sampler(n, m));
  double min_radius = kInf;
  for (const auto& p : image.points) min_radius = std::min(min_radius, (p - f0).norm());
  bool encloses = true;
  if (n == 2) {
    const double w = winding_number(image.points, f0);
    rep.measured["winding_number"] = w;
    encloses = std::abs(std::abs(w) - 1) < 1e-6;
  }
  rep.measured["min_image_radius"] = min_radius;
  const bool contained = min_radius >= 5.0 / 6.0 && encloses;

  PointSet line(n);
  const double ext = opts.line_extent;
  if (n == 2) {
    const std::size_t k = opts.line_samples ? opts.line_samples : 4001;
    for (std::size_t i = 0; i < k; ++i) {
      const double s = -ext + 2 * ext * static_cast<double>(i) / static_cast<double>(k - 1);
      line.points.push_back(maps::evaluate(f, make_point({0.0, s})));
    }
  } else {
    const std::size_t k = opts.line_samples ? opts.line_samples : 121;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double a = -ext + 2 * ext * static_cast<double>(i) / static_cast<double>(k - 1);
        const double b = -ext + 2 * ext * static_cast<double>(j) / static_cast<double>(k - 1);
        line.points.push_back(maps::evaluate(f, make_point({0.0, a, b})));
      }
  }
  auto fo = flatness::FlatnessOptions{};
  if (n == 3) fo.refine_starts = 2;
  const auto fl = flatness::local_flatness(line, f0, 0.5, fo);
  // Covering radius of the sampled line or plane grid, clipped by the ball.
  const double resolution = std::sqrt(n - 1.0) * fl.sample_spacing / 0.5;
  rep.measured["theta"] = fl.theta;
  rep.measured["sample_spacing"] = fl.sample_spacing;
  rep.measured["resolution"] = resolution;
  rep.measured["point_count"] = fl.point_count;
  rep.bound["theta_bound_with_resolution"] = 20 * epsilon + resolution;

  const bool flat = fl.theta <= 20 * epsilon + resolution;
  rep.measured["containment"] = contained;
  rep.measured["flatness"] = flat;
  rep.margin = std::min(min_radius - 5.0 / 6.0, 20 * epsilon + resolution - fl.theta);
  return done(contained && flat ? Status::pass : Status::fail, "");
}

std::vector<NormalizedLinear> normalized_linear_family(std::size_t count, double epsilon_max,
                                                       std::uint64_t seed) {
  if (!(epsilon_max > 0)) throw Error("epsilon_max must be positive");
  auto rng = block_engine(seed, 0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<NormalizedLinear> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = i % 2 == 0 ? 2 : 3;
    Mat a = Mat::Identity(n, n);
    if (i == 1) {
      a.bottomRightCorner(2, 2) = maps::rotation_2d(0.7);
    } else if (i > 1) {
      double delta = epsilon_max * (0.2 + 0.4 * (u(rng) + 1));
      const double phi = kPi * u(rng);
      Mat trial;
      for (;;) {
        trial = Mat::Identity(n, n);
        if (n == 2) {
          trial(0, 1) = delta * u(rng);
          trial(1, 1) = 1 + delta * u(rng);
        } else {
          trial(0, 1) = delta * u(rng);
          trial(0, 2) = delta * u(rng);
          Mat b = Mat::Identity(2, 2);
          for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) b(r, c) += delta * u(rng);
          trial.bottomRightCorner(2, 2) = maps::rotation_2d(phi) * b;
        }
        if (condition_number(trial) - 1 <= epsilon_max) break;
        delta *= 0.5;
      }
      a = trial;
    }
    out.push_back({MapSpec::linear(a), condition_number(a)});
  }
  return out;
}

ExperimentReport lemma_suite(std::size_t count, double epsilon_max, std::uint64_t seed) {
  const auto start = Clock::now();
  ExperimentReport rep;
  rep.name = "lemma_suite";
  rep.inputs = {{"count", count}, {"epsilon_max", epsilon_max}, {"seed", seed}};
  rep.bound = {{"containment_radius", 5.0 / 6.0}, {"theta_bound", "20 epsilon"}};
  const auto family = normalized_linear_family(count, epsilon_max, seed);
  std::vector<ExperimentReport> runs(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    LemmaOptions lo;
    lo.closed_form_H = family[i].H;
    runs[i] = lemma_flat_check(family[i].map, family[i].H - 1, lo);
  }
  std::size_t failures = 0;
  double margin = kInf;
  Json maps_json = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (r.status != Status::pass) ++failures;
    margin = std::min(margin, r.margin);
    maps_json.push_back({{"dim", family[i].map.dim},
                         {"H", family[i].H},
                         {"theta", r.measured.value("theta", 0.0)},
                         {"min_image_radius", r.measured.value("min_image_radius", 0.0)},
                         {"status", to_string(r.status)}});
  }
  rep.measured = {{"maps", maps_json}, {"failures", failures}};
  rep.margin = runs.empty() ? 0.0 : margin;
  rep.status = failures == 0 ? Status::pass : Status::fail;
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport flatness_vs_bound(const MapSpec& f, const PointSet& centers,
                                   const std::vector<double>& t_list, const FlatnessBoundOptions& opts) {
  const auto start = Clock::now();
  f.validate();
  if (centers.empty() || centers.dim != f.dim) throw Error("centers must be points of the map's dimension");
  if (t_list.empty()) throw Error("t_list is empty");
  for (double t : t_list)
    if (!(t > 0 && t < 1)) throw Error("scales must lie in (0, 1)");
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end(), std::greater<>());

  ExperimentReport rep;
  rep.name = "flatness_vs_bound";
  rep.inputs = {{"map", io::map_to_json(f)},
                {"center_count", centers.size()},
                {"t", array_of(ts)},
                {"sphere_samples", opts.sphere_samples},
                {"qs_triples", opts.qs_triples},
                {"seed", opts.seed}};
  if (opts.closed_form_H_tilde) rep.inputs["closed_form_H_tilde"] = *opts.closed_form_H_tilde;

  std::vector<double> eps(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    eps[k] = opts.closed_form_H_tilde ? *opts.closed_form_H_tilde
                                      : sup_H_tilde(f, centers.points, 2 * ts[k], opts.qs_triples, opts.seed);
  rep.measured["H_tilde"] = array_of(eps);
  const auto finish = [&](Status s, std::string note) {
    rep.status = s;
    rep.note = std::move(note);
    rep.runtime_seconds = seconds_since(start);
    return rep;
  };
  if (*std::max_element(eps.begin(), eps.end()) > kEpsilonMax)
    return finish(Status::not_applicable, "H~ exceeds 1/20 on the needed balls");

  const auto table = sup_theta(f, centers.points, ts, opts.sphere_samples);
  rep.measured["sup_theta"] = array_of(table.sup);
  rep.measured["sample_spacing"] = array_of(table.spacing);

  // M_r: largest image displacement over the sampled sphere within r of a center.
  const PointSet sphere = sphere_sampler(f.dim, std::min<std::size_t>(opts.sphere_samples, 20000));
  double M = 0.0;
  for (const auto& z : centers.points) {
    const Point fz = maps::evaluate(f, z);
    for (const auto& x : sphere.points)
      if ((x - z).norm() <= ts.front()) M = std::max(M, (maps::evaluate(f, x) - fz).norm());
  }
  rep.measured["M_r"] = M;

  std::vector<double> beta(ts.size()), rhs(ts.size());
  double C = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double alpha = 1 / (1 + eps[k]);
    beta[k] = 2 * alpha * alpha - 1;
    C = std::max(C, std::max(0.0, table.sup[k] - 20 * eps[k]) / std::pow(ts[k], beta[k]));
  }
  double margin = kInf;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    rhs[k] = 20 * eps[k] + C * std::pow(ts[k], beta[k]);
    margin = std::min(margin, rhs[k] - table.sup[k]);
  }
  rep.bound = {{"beta", array_of(beta)}, {"C_calibrated", C}, {"rhs", array_of(rhs)}};
  rep.margin = margin;

  bool resolved = true;
  for (std::size_t k = 0; k < ts.size(); ++k) resolved = resolved && table.spacing[k] <= ts[k] / 10;
  if (!resolved) return finish(Status::inconclusive, "sample spacing exceeds t/10");
  bool monotone = true;
  for (std::size_t k = 1; k < ts.size(); ++k) monotone = monotone && table.sup[k] <= table.sup[k - 1] + 1e-12;
  rep.measured["monotone"] = monotone;
  return finish(monotone ? Status::pass : Status::fail, monotone ? "" : "sup theta grows as t shrinks");
}

ExperimentReport curve_dimension(const PointSet& curve, const std::string& label) {
  const auto start = Clock::now();
  if (curve.dim != 2) throw Error("box dimension check runs on planar curves");
  Point lo = curve[0], hi = curve[0];
  for (const auto& p : curve.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double s_max = (hi - lo).norm() / 4;
  const auto bd = gen::box_dimension(curve, s_max / 256, s_max);
  ExperimentReport rep;
  rep.name = "curve_dimension";
  rep.inputs = {{"label", label}, {"point_count", curve.size()}, {"s_min", s_max / 256}, {"s_max", s_max}};
  rep.measured = {{"dimension", bd.dimension},
                  {"residual", bd.residual},
                  {"scales", array_of(bd.scales)},
                  {"counts", array_of(bd.counts)}};
  rep.bound = {{"dimension_lower", 0.95}};
  rep.margin = bd.dimension - 0.95;
  rep.status = bd.dimension >= 0.95 ? Status::pass : Status::fail;
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport dimension_bound_check(const MapSpec& f, const DimensionOptions& opts) {
  const auto start = Clock::now();
  f.validate();
  ExperimentReport rep;
  rep.name = "dimension_bound_check";
  rep.inputs = {{"map", io::map_to_json(f)},
                {"curve_samples", opts.curve_samples},
                {"radii", array_of(opts.radii)},
                {"centers", opts.centers},
                {"qs_triples", opts.qs_triples},
                {"seed", opts.seed}};
  if (f.dim != 2) {
    rep.status = Status::not_applicable;
    rep.note = "box counting runs on planar image curves";
    return rep;
  }
  if (opts.radii.empty()) throw Error("radii list is empty");
  const auto dim = curve_dimension(image_of(f, sphere_sampler(2, opts.curve_samples)), "image");
  const double d = dim.measured.at("dimension").get<double>();

  const auto centers = sphere_sampler(2, opts.centers);
  double inf_sup = kInf;
  std::vector<double> per_radius;
  for (double r : opts.radii) {
    per_radius.push_back(sup_H_tilde(f, centers.points, r, opts.qs_triples, opts.seed));
    inf_sup = std::min(inf_sup, per_radius.back());
  }
  const double excess = std::max(0.0, d - 1);
  const double C = excess == 0 ? 0.0 : (inf_sup > 0 ? excess / (inf_sup * inf_sup) : kInf);
  rep.measured = dim.measured;
  rep.measured["H_tilde_sup_by_radius"] = array_of(per_radius);
  rep.measured["H_tilde_inf_sup"] = inf_sup;
  rep.bound = {{"dimension_lower", 0.95}, {"C_calibrated", io::number(C)}};
  rep.margin = d - 0.95;
  rep.status = d >= 0.95 ? Status::pass : Status::fail;
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport thm31_sweep(const std::string& family, const std::vector<double>& K_grid,
                             const SweepOptions& opts) {
  const auto start = Clock::now();
  if (family != "radial" && family != "linear") throw Error("unknown family: " + family);
  if (K_grid.empty()) throw Error("K grid is empty");
  std::vector<double> ks = K_grid;
  std::sort(ks.begin(), ks.end());

  ExperimentReport rep;
  rep.name = "thm31_sweep";
  rep.inputs = {{"family", family}, {"K", array_of(ks)}, {"qs_triples", opts.qs_triples}, {"seed", opts.seed}};
  const auto ctx = special::SpecialFnContext::for_dimension(2);
  const double linear_C = 1 / std::log(1 / 0.3);

  Json entries = Json::array();
  std::vector<double> ratios;
  bool linear_ok = true;
  for (double K : ks) {
    Json e = {{"K", K}};
    if (K == 1) {
      e["H_tilde"] = 0.0;
      e["ratio"] = 0.0;
      e["flag"] = "endpoint";
      entries.push_back(e);
      continue;
    }
    if (!(K > 1 && K <= 4.0 / 3.0 + 1e-12)) {
      e["flag"] = "outside (1, 4/3]";
      entries.push_back(e);
      continue;
    }
    try {
      const auto tp = special::radius_threshold(ctx, K, K);
      e["log_R"] = io::number(tp.log_R);
      if (!(tp.log_R <= 700)) {
        e["flag"] = "R beyond double range";
        entries.push_back(e);
        continue;
      }
    } catch (const Error& err) {
      e["flag"] = std::string("threshold failed: ") + err.what();
      entries.push_back(e);
      continue;
    }
    Mat d = Mat::Identity(2, 2);
    d(0, 0) = K;
    const MapSpec f = family == "radial" ? MapSpec::radial_stretch(2, 1 / K) : MapSpec::linear(d);
    const double h = floor_small(qs::weak_qs_constant(f, Point::Zero(2), 1.0, opts.qs_triples, opts.seed).H_tilde);
    const double denom = (K - 1) * std::log(1 / (K - 1));
    e["H_tilde"] = h;
    e["ratio"] = h / denom;
    ratios.push_back(h / denom);
    if (family == "linear") {
      e["H_tilde_closed_form"] = K - 1;
      if (K <= 1.3) {
        const bool holds = h <= linear_C * denom * (1 + 1e-9);
        e["linear_bound_holds"] = holds;
        linear_ok = linear_ok && holds;
      }
    }
    entries.push_back(e);
  }
  rep.measured["entries"] = entries;
  rep.bound = {{"max_over_min", 10.0}, {"monotone_tolerance", 0.05}};
  if (family == "linear") rep.bound["linear_C"] = linear_C;

  if (ratios.size() < 2) {
    rep.status = Status::inconclusive;
    rep.note = "fewer than two usable grid entries";
    rep.runtime_seconds = seconds_since(start);
    return rep;
  }
  const double mx = *std::max_element(ratios.begin(), ratios.end());
  const double mn = *std::min_element(ratios.begin(), ratios.end());
  const double spread = mn > 0 ? mx / mn : kInf;
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < ratios.size(); ++i) monotone = monotone && ratios[i] <= ratios[i + 1] * 1.05;
  rep.measured["max_over_min"] = io::number(spread);
  rep.measured["monotone_toward_1"] = monotone;
  rep.margin = 10 - spread;
  rep.status = spread < 10 && monotone && linear_ok ? Status::pass : Status::fail;
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport kh_chain(std::size_t dilatation_samples, std::size_t triples, std::uint64_t seed) {
  const auto start = Clock::now();
  ExperimentReport rep;
  rep.name = "kh_chain";
  rep.inputs = {{"dilatation_samples", dilatation_samples}, {"triples", triples}, {"seed", seed},
                {"ball_radius", 2.0}};
  rep.bound = {{"tolerance", 0.05}};
  Json rows = Json::array();
  bool all = true;
  double margin = kInf;
  for (const auto& nm : maps::builtin_maps()) {
    const maps::BallRegion ball{Point::Zero(nm.map.dim), 2.0};
    const auto r = qs::check_KH_inequality(nm.map, ball, dilatation_samples, triples, seed);
    rows.push_back({{"map", nm.name}, {"K", r.K}, {"H", r.H}, {"bound", r.bound}, {"margin", r.margin},
                    {"pass", r.pass}});
    all = all && r.pass;
    margin = std::min(margin, r.margin);
  }
  rep.measured["maps"] = rows;
  rep.margin = margin;
  rep.status = all ? Status::pass : Status::fail;
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport rectifiability_pipeline(const MapSpec& f, const PipelineOptions& opts) {
  const auto start = Clock::now();
  f.validate();
  std::vector<double> scales = opts.scales.empty() ? default_scales() : opts.scales;
  std::sort(scales.begin(), scales.end());
  for (double t : scales)
    if (!(t > 0 && t < 1)) throw Error("scales must lie in (0, 1)");

  ExperimentReport rep;
  rep.name = "rectifiability_pipeline";
  rep.inputs = {{"map", io::map_to_json(f)},
                {"scales", array_of(scales)},
                {"curve_samples", opts.curve_samples},
                {"centers", opts.centers},
                {"dilatation_samples", opts.dilatation_samples},
                {"qs_triples", opts.qs_triples},
                {"seed", opts.seed}};

  std::vector<double> k_values;
  for (const auto& a : maps::annulus_dilatation_profile(f, scales, opts.dilatation_samples))
    k_values.push_back(floor_small(a.K_tilde));
  const auto centers = sphere_sampler(f.dim, opts.centers);
  std::vector<double> h_values;
  for (double t : scales) h_values.push_back(sup_H_tilde(f, centers.points, t, opts.qs_triples, opts.seed));

  const auto verdict = dini::classify_rectifiability(dini::ScaleProfile::measured(scales, k_values),
                                                     dini::ScaleProfile::measured(scales, h_values));
  rep.measured["K_tilde"] = array_of(k_values);
  rep.measured["H_tilde"] = array_of(h_values);
  rep.measured["k_condition"] = io::to_json(verdict.k_condition);
  if (verdict.h_condition) rep.measured["h_condition"] = io::to_json(*verdict.h_condition);
  rep.measured["majorant_b"] = io::number(verdict.majorant.b);
  rep.measured["asymptotically_conformal_hypothesis"] = dini::yes_no(verdict.thm_asymptotic);
  rep.measured["weak_qs_hypothesis"] = dini::yes_no(verdict.thm_weak_qs);

  dini::Verdict theta_verdict = dini::Verdict::inconclusive;
  dini::Verdict length_verdict = dini::Verdict::inconclusive;
  if (f.dim == 2) {
    const auto table = sup_theta(f, centers.points, scales, 0);
    const auto theta_rep = dini::dini_integral(dini::ScaleProfile::measured(scales, table.sup));
    theta_verdict = theta_rep.verdict;
    rep.measured["sup_theta"] = array_of(table.sup);
    rep.measured["theta_sample_spacing"] = array_of(table.spacing);
    rep.measured["theta_dini"] = io::to_json(theta_rep);

    const std::size_t N = std::max<std::size_t>(opts.curve_samples, 16);
    const double l_half = closed_polygon_length(image_of(f, sphere_sampler(2, N / 2)));
    const double l_full = closed_polygon_length(image_of(f, sphere_sampler(2, N)));
    const double rel = std::abs(l_full - l_half) / l_full;
    rep.measured["length"] = l_full;
    rep.measured["length_relative_change"] = rel;
    length_verdict = rel < 1e-3 ? dini::Verdict::finite : dini::Verdict::inconclusive;
  } else {
    rep.note = "surface flatness and area are not measured in space";
  }
  rep.measured["theta_verdict"] = dini::to_string(theta_verdict);
  rep.measured["length_verdict"] = dini::to_string(length_verdict);

  const bool decided = theta_verdict != dini::Verdict::inconclusive && length_verdict != dini::Verdict::inconclusive;
  // The hypotheses are sufficient conditions: a "yes" must come with a finite length.
  bool agree = theta_verdict == length_verdict;
  for (auto v : {verdict.thm_asymptotic, verdict.thm_weak_qs})
    if (v == dini::Verdict::finite && length_verdict == dini::Verdict::divergent) agree = false;
  rep.measured["agreement"] = decided && agree;
  rep.status = combine(agree, decided);
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

std::function<double(double)> schedule_theta_of_u(const gen::AngleSchedule& schedule) {
  constexpr int kTable = 1 << 20;
  auto u = std::make_shared<std::vector<double>>();
  auto th = std::make_shared<std::vector<double>>();
  u->reserve(kTable + 1);
  th->reserve(kTable);
  u->push_back(0.0);
  for (int j = 1; j <= kTable; ++j) {
    const double a = schedule.angle(j);
    th->push_back(a);
    u->push_back(u->back() + std::log(1 / gen::piece_ratio(a)));
  }
  const double du = u->back() - (*u)[u->size() - 2];
  return [u, th, du, schedule](double x) {
    if (x <= u->back()) {
      const auto it = std::lower_bound(u->begin(), u->end(), x);
      const auto j = std::max<std::ptrdiff_t>(1, it - u->begin());
      return (*th)[static_cast<std::size_t>(j - 1)];
    }
    // Past the table the generation length is taken as constant.
    const double j = kTable + std::ceil((x - u->back()) / du);
    switch (schedule.kind) {
      case gen::AngleSchedule::Kind::constant: return schedule.theta;
      case gen::AngleSchedule::Kind::power: return schedule.c * std::pow(j, -schedule.q);
      case gen::AngleSchedule::Kind::list: return 0.0;
    }
    return 0.0;
  };
}

LengthTrend length_trend(const gen::AngleSchedule& schedule) {
  LengthTrend out;
  double total = 0.0;
  for (int k = 0; k < 20; ++k) {
    double s = 0.0;
    for (int j = 1 << k; j < (1 << (k + 1)); ++j) s += std::log(gen::length_factor(schedule.angle(j)));
    out.log_length_increments.push_back(s);
    total += s;
  }
  const auto& inc = out.log_length_increments;
  int divergent_steps = 0;
  dini::TailDecision last;
  for (std::size_t k = 1; k < inc.size(); ++k) {
    last = dini::judge_tail(inc[k - 1], inc[k], total, 1e-3);
    divergent_steps = last.verdict == dini::Verdict::divergent ? divergent_steps + 1 : 0;
  }
  if (divergent_steps >= 8)
    out.verdict = dini::Verdict::divergent;
  else
    out.verdict = last.verdict == dini::Verdict::finite ? dini::Verdict::finite : dini::Verdict::inconclusive;
  return out;
}

ExperimentReport rectifiability_pipeline(const gen::AngleSchedule& schedule, const PipelineOptions& opts) {
  const auto start = Clock::now();
  schedule.validate();
  ExperimentReport rep;
  rep.name = "rectifiability_pipeline";
  rep.inputs = {{"schedule", schedule.describe()}, {"generations", opts.generations}};

  const auto theta_rep = dini::dini_integral(dini::ScaleProfile::analytic(schedule_theta_of_u(schedule)));
  const auto trend = length_trend(schedule);
  auto dim_schedule = schedule;
  dim_schedule.generations = opts.generations;
  dim_schedule.validate();
  const auto curve = gen::snowflake(dim_schedule);
  const auto dim = curve_dimension(curve.polyline, "snowflake");

  rep.measured["theta_dini"] = io::to_json(theta_rep);
  rep.measured["log_length_increments"] = array_of(trend.log_length_increments);
  rep.measured["length_verdict"] = dini::to_string(trend.verdict);
  rep.measured["theta_verdict"] = dini::to_string(theta_rep.verdict);
  rep.measured["dimension"] = dim.measured.at("dimension");
  rep.measured["polyline_length"] = gen::checked_length(curve);

  const bool decided =
      theta_rep.verdict != dini::Verdict::inconclusive && trend.verdict != dini::Verdict::inconclusive;
  const bool agree = theta_rep.verdict == trend.verdict;
  rep.measured["agreement"] = decided && agree;
  rep.status = combine(agree, decided);
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

namespace {

template <class T>
T param(const Json& p, const char* key, T fallback) {
  return p.contains(key) ? p.at(key).get<T>() : fallback;
}

MapSpec map_param(const Json& p, const std::string& fallback) {
  if (!p.contains("map")) return maps::builtin_map(fallback);
  const auto& m = p.at("map");
  return m.is_string() ? maps::builtin_map(m.get<std::string>()) : io::map_from_json(m);
}

std::vector<double> list_param(const Json& p, const char* key, std::vector<double> fallback) {
  return p.contains(key) ? p.at(key).get<std::vector<double>>() : fallback;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"lemma_flat_check", "lemma_suite",  "flatness_vs_bound",      "dimension_bound_check",
          "curve_dimension",  "thm31_sweep",  "kh_chain",               "rectifiability_pipeline"};
}

ExperimentReport run_named(const std::string& name, const Json& params, std::uint64_t seed) {
  const Json p = params.is_null() ? Json::object() : params;
  if (!p.is_object()) throw Error("experiment parameters must be a JSON object");
  try {
    ExperimentReport rep;
    if (name == "lemma_flat_check") {
      LemmaOptions lo;
      lo.closed_form_H = param(p, "closed_form_H", 1.0);
      lo.sphere_samples = param<std::size_t>(p, "sphere_samples", 0);
      lo.line_samples = param<std::size_t>(p, "line_samples", 0);
      rep = lemma_flat_check(map_param(p, "identity_2d"), param(p, "epsilon", 0.0), lo);
    } else if (name == "lemma_suite") {
      rep = lemma_suite(param<std::size_t>(p, "count", 50), param(p, "epsilon_max", 0.05), seed);
    } else if (name == "flatness_vs_bound") {
      const MapSpec f = map_param(p, "identity_2d");
      FlatnessBoundOptions fo;
      fo.sphere_samples = param<std::size_t>(p, "sphere_samples", fo.sphere_samples);
      fo.qs_triples = param<std::size_t>(p, "qs_triples", fo.qs_triples);
      fo.seed = seed;
      if (p.contains("closed_form_H_tilde")) fo.closed_form_H_tilde = p.at("closed_form_H_tilde").get<double>();
      const auto centers = sphere_sampler(f.dim, param<std::size_t>(p, "centers", 16));
      rep = flatness_vs_bound(f, centers, list_param(p, "t", {0.2, 0.1, 0.05, 0.025}), fo);
    } else if (name == "dimension_bound_check") {
      DimensionOptions d;
      d.curve_samples = param<std::size_t>(p, "curve_samples", d.curve_samples);
      d.radii = list_param(p, "radii", d.radii);
      d.centers = param<std::size_t>(p, "centers", d.centers);
      d.qs_triples = param<std::size_t>(p, "qs_triples", d.qs_triples);
      d.seed = seed;
      rep = dimension_bound_check(map_param(p, "identity_2d"), d);
    } else if (name == "curve_dimension") {
      const auto s = gen::AngleSchedule::parse(param<std::string>(p, "angles", "const:60deg"),
                                               param(p, "generations", 7));
      rep = curve_dimension(gen::snowflake(s).polyline, s.describe());
    } else if (name == "thm31_sweep") {
      SweepOptions so;
      so.qs_triples = param<std::size_t>(p, "qs_triples", so.qs_triples);
      so.seed = seed;
      rep = thm31_sweep(param<std::string>(p, "family", "radial"), list_param(p, "K", {1.05, 1.1, 1.2, 1.3}), so);
    } else if (name == "kh_chain") {
      rep = kh_chain(param<std::size_t>(p, "dilatation_samples", 100000), param<std::size_t>(p, "triples", 200000),
                     seed);
    } else if (name == "rectifiability_pipeline") {
      PipelineOptions po;
      po.scales = list_param(p, "scales", {});
      po.curve_samples = param<std::size_t>(p, "curve_samples", po.curve_samples);
      po.centers = param<std::size_t>(p, "centers", po.centers);
      po.dilatation_samples = param<std::size_t>(p, "dilatation_samples", po.dilatation_samples);
      po.qs_triples = param<std::size_t>(p, "qs_triples", po.qs_triples);
      po.generations = param(p, "generations", po.generations);
      po.seed = seed;
      if (p.contains("angles"))
        rep = rectifiability_pipeline(gen::AngleSchedule::parse(p.at("angles").get<std::string>(), po.generations),
                                      po);
      else
        rep = rectifiability_pipeline(map_param(p, "identity_2d"), po);
    } else {
      throw Error("unknown experiment: " + name);
    }
    rep.inputs["seed"] = seed;
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad experiment parameters: ") + e.what());
  }
}

}  // namespace qsphere::experiments
