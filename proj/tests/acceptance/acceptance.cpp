// One line per acceptance criterion: "PASS|FAIL NN name: detail".
// `--criterion NN` runs a single criterion; the exit code is 1 on any failure.

#include "qsphere/dilatation.hpp"
#include "qsphere/dini.hpp"
#include "qsphere/experiments.hpp"
#include "qsphere/flatness.hpp"
#include "qsphere/generators.hpp"
#include "qsphere/geometry.hpp"
#include "qsphere/parallel.hpp"
#include "qsphere/quasisymmetry.hpp"
#include "qsphere/special_functions.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace qsphere;
namespace ex = qsphere::experiments;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Mat random_rotation(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1;
  return q;
}

PointSet random_cloud(std::mt19937_64& rng, int n, std::size_t count) {
  std::uniform_real_distribution<double> u(-1, 1);
  PointSet s(n);
  for (std::size_t k = 0; k < count; ++k) {
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = u(rng);
    s.points.push_back(p);
  }
  return s;
}

Outcome koch_dimension() {
  const auto start = std::chrono::steady_clock::now();
  const auto curve = gen::snowflake(gen::AngleSchedule::constant(kPi / 3, 7));
  const auto d = gen::box_dimension(curve.polyline, 0.25 / 256, 0.25);
  const double secs = seconds_since(start);
  const bool ok = d.dimension >= 1.21 && d.dimension <= 1.31 && secs < 30;
  return {ok, "dimension " + fmt(d.dimension) + " in [1.21, 1.31] (log 4/log 3 = " + fmt(std::log(4.0) / std::log(3.0)) +
                  "), " + fmt(secs) + " s"};
}

Outcome dilatation_closed_forms() {
  const double k1 = maps::dilatation(maps::MapSpec::linear(diag2(2, 1)), maps::BallRegion{make_point({0, 0}), 1.0}).K;
  const double k2 = maps::dilatation(maps::MapSpec::radial_stretch(2, 0.5), maps::AnnulusRegion{0.5}).K;
  const double e1 = std::abs(k1 - 2), e2 = std::abs(k2 - 2);
  return {e1 <= 1e-9 && e2 <= 1e-6, "diag(2,1) K=" + fmt(k1) + " (err " + fmt(e1) + "), radial a=0.5 on A_0.5 K=" +
                                        fmt(k2) + " (err " + fmt(e2) + ")"};
}

// Brute force over all triples of grid points of step h in the closed unit disc.
double grid_qs_oracle(const maps::MapSpec& f, double h) {
  std::vector<Point> pts, img;
  const int m = static_cast<int>(std::floor(1 / h));
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      const Point p = make_point({i * h, j * h});
      if (p.norm() <= 1 + 1e-12) {
        pts.push_back(p);
        img.push_back(maps::evaluate(f, p));
      }
    }
  const std::size_t n = pts.size();
  std::vector<double> best(n, 0.0);
  parallel_for(n, [&](std::size_t a) {
    double b = 0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == a) continue;
      const double dxy = (pts[a] - pts[y]).norm(), fxy = (img[a] - img[y]).norm();
      for (std::size_t z = 0; z < n; ++z) {
        if (z == a || (pts[a] - pts[z]).norm() < dxy) continue;
        b = std::max(b, fxy / (img[a] - img[z]).norm());
      }
    }
    best[a] = b;
  });
  return *std::max_element(best.begin(), best.end());
}

Outcome weak_qs_oracle() {
  const auto f = maps::MapSpec::linear(diag2(2, 1));
  const double h = qs::weak_qs_constant(f, make_point({0, 0}), 1.0, 1000000, 20240601).H;
  const double oracle = grid_qs_oracle(f, 0.125);
  const bool ok = h >= 1.96 && h <= 2.0 + 1e-12 && std::abs(oracle - 2) < 1e-12;
  return {ok, "sampled H " + fmt(h) + " in [1.96, 2], grid oracle sup " + fmt(oracle)};
}

Outcome kh_chain() {
  const auto r = ex::kh_chain();
  return {r.status == ex::Status::pass, "12 maps, worst margin " + fmt(r.margin)};
}

Outcome special_functions() {
  const auto plane = special::SpecialFnContext::for_dimension(2);
  const double g = special::grotzsch_gamma_2d(std::sqrt(2.0));
  int sandwich_bad = 0;
  for (int k = 0; k < 100; ++k) {
    const double t = 1.001 * std::pow(1000 / 1.001, k / 99.0);
    const double v = special::grotzsch_gamma_2d(t);
    const auto b = special::gamma_bounds(plane, t);
    if (!(b.lo <= v && v <= b.hi)) ++sandwich_bad;
  }
  const double rho = special::ring_modulus_rho(2, 1.0, std::exp(1.0));
  // 50-digit reference for λ = 4, A = 1.21.
  const double t0_ref = 0.067119676121686415068334669932811;
  const double t0 = special::t0_constant(plane, 1.1).value;
  const double t0_rel = std::abs(t0 / t0_ref - 1);
  const bool ok = std::abs(g - 4) <= 1e-9 && sandwich_bad == 0 && std::abs(rho - 2 * kPi) <= 1e-12 && t0_rel <= 1e-10;
  return {ok, "gamma_2(sqrt 2) err " + fmt(std::abs(g - 4)) + ", sandwich violations " + std::to_string(sandwich_bad) +
                  "/100, rho_2(1,e) err " + fmt(std::abs(rho - 2 * kPi)) + ", t0 rel err " + fmt(t0_rel)};
}

Outcome flat_lemma_suite() {
  const auto r = ex::lemma_suite(50, 0.05, 1);
  const auto failures = r.measured.at("failures").get<std::size_t>();
  return {failures == 0 && r.status == ex::Status::pass,
          std::to_string(failures) + " failures of 50, worst margin " + fmt(r.margin)};
}

Outcome distortion_ratio() {
  const auto plane = special::SpecialFnContext::for_dimension(2);
  bool ok = true;
  std::string detail;
  for (double A : {1.05, 1.1, 1.21, 1.44, 16.0 / 9.0}) {
    const auto q = special::qs_bound_evaluator(plane, A);
    ok = ok && q.holds && q.ratio.exact;
    detail += (detail.empty() ? "" : ", ") + std::string("A=") + fmt(A) + ": " + fmt(q.ratio.hi) + " <= " +
              fmt(q.ratio_bound);
  }
  return {ok, detail};
}

Outcome dini_quadrature() {
  using dini::Verdict;
  dini::DiniOptions lw;
  lw.p = 2;
  lw.log_weighted = true;
  const auto root = dini::dini_integral(dini::ScaleProfile::analytic([](double u) { return std::exp(-u / 2); }), lw);
  dini::DiniOptions plain;
  plain.p = 2;
  const auto konst = dini::dini_integral(dini::ScaleProfile::analytic([](double) { return 0.25; }), plain);
  dini::DiniOptions small = lw;
  small.t_max = 0.01;
  const auto inv_log =
      dini::dini_integral(dini::ScaleProfile::analytic([](double u) { return 1 / u; }, 1e-12, 0.01), small);
  dini::DiniOptions small_plain = plain;
  small_plain.t_max = 0.01;
  const auto inv_sqrt = dini::dini_integral(
      dini::ScaleProfile::analytic([](double u) { return 1 / std::sqrt(u); }, 1e-12, 0.01), small_plain);
  const bool ok = std::abs(root.value - 0.5) <= 1e-4 && konst.verdict == Verdict::divergent &&
                  inv_log.verdict == Verdict::finite && inv_sqrt.verdict == Verdict::divergent;
  return {ok, "sqrt(t) log-weighted " + fmt(root.value) + ", constant " + dini::to_string(konst.verdict) +
                  ", 1/log(1/t) " + dini::to_string(inv_log.verdict) + ", 1/sqrt(log(1/t)) " +
                  dini::to_string(inv_sqrt.verdict)};
}

Outcome change_of_variables() {
  const dini::ChangeOfVariables cov([](double t) { return std::sqrt(t); },
                                    [](double t) { return 0.5 / std::sqrt(t); }, 2.0);
  double worst = 0;
  for (int k = 0; k <= 400; ++k) {
    const double t = 1e-4 * std::pow(0.5 / 1e-4, k / 400.0);
    worst = std::max(worst, std::abs(cov.log_derivative_fd(t) / cov.log_derivative(t) - 1));
  }
  return {worst <= 1e-5, "max relative deviation " + fmt(worst) + " over 401 points in [1e-4, 0.5]"};
}

Outcome snowflake_dichotomy() {
  const auto a = gen::predicted_lengths(gen::AngleSchedule::power(1.0, 1.0, 10), 10);
  const auto b = gen::predicted_lengths(gen::AngleSchedule::power(1.0, 0.5, 10), 10);
  // Polyline cross-check at generation 10.
  const double la = gen::checked_length(gen::snowflake(gen::AngleSchedule::power(1.0, 1.0, 10)));
  const double lb = gen::checked_length(gen::snowflake(gen::AngleSchedule::power(1.0, 0.5, 10)));
  const double inc = a[10] - a[9];
  const double growth = b[10] / b[9] - 1;
  const bool ok = inc < 1e-3 && growth > 0.005;
  return {ok, "theta_j=1/j: L10-L9 = " + fmt(inc) + " (< 1e-3 required, L10 = " + fmt(la) +
                  "); theta_j=1/sqrt(j): L10/L9-1 = " + fmt(growth) + " (> 0.005 required, L10 = " + fmt(lb) + ")"};
}

Outcome threshold_sweep() {
  const auto r = ex::thm31_sweep("radial", {1.05, 1.1, 1.2, 1.3});
  return {r.status == ex::Status::pass, "max/min " + r.measured.at("max_over_min").dump() + ", non-decreasing in K: " +
                                            r.measured.at("monotone_toward_1").dump()};
}

Outcome property_suites() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  int hausdorff_bad = 0, invariance_bad = 0, beta_bad = 0, range_bad = 0, majorant_bad = 0;
  double worst_invariance = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 2;
    const auto A = random_cloud(rng, n, 10 + rng() % 30), B = random_cloud(rng, n, 10 + rng() % 30),
               C = random_cloud(rng, n, 10 + rng() % 30);
    const double ab = geometry::hausdorff_distance(A, B), ba = geometry::hausdorff_distance(B, A);
    const double ac = geometry::hausdorff_distance(A, C), cb = geometry::hausdorff_distance(C, B);
    if (geometry::hausdorff_distance(A, A) != 0 || ab != ba || !(ab > 0) || ab > ac + cb + 1e-15) ++hausdorff_bad;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_cloud(rng, 2, 40);
    const Point x = s[0];
    const double r = 0.3 + 0.7 * u(rng);
    const double theta = flatness::local_flatness(s, x, r).theta;
    const Mat q = random_rotation(rng, 2);
    const Point v = random_cloud(rng, 2, 1)[0];
    const double lambda = std::exp(4 * u(rng) - 2);
    PointSet moved(2);
    for (const auto& p : s.points) moved.points.push_back(lambda * (q * p + v));
    const double theta2 = flatness::local_flatness(moved, Point(lambda * (q * x + v)), lambda * r).theta;
    worst_invariance = std::max(worst_invariance, std::abs(theta - theta2));
    if (std::abs(theta - theta2) > 1e-9) ++invariance_bad;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 2;
    const auto s = random_cloud(rng, n, n == 2 ? 60 : 120);
    const Point x = s[0];
    const double r = 0.2 + 0.8 * u(rng);
    const double theta = flatness::local_flatness(s, x, r).theta;
    const double beta = flatness::jones_beta(s, x, r);
    if (!(theta >= 0 && theta <= 1)) ++range_bad;
    if (beta > theta + 1e-12) ++beta_bad;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> t, g;
    for (int k = 0; k < 25; ++k) {
      t.push_back(std::pow(10.0, -4 + 4 * k / 24.0));
      g.push_back(0.5 * t.back() * (1 + 0.3 * (u(rng) - 0.5)));
    }
    const auto m = dini::build_majorant(dini::ScaleProfile::measured(t, g));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const bool ok = m.value[i] >= g[i] && (m.b_infinite || m.value[i] <= m.b * g[i] * (1 + 1e-12)) &&
                      (i == 0 || m.value[i] >= m.value[i - 1]);
      if (!ok) {
        ++majorant_bad;
        break;
      }
    }
  }
  const bool ok = hausdorff_bad + invariance_bad + beta_bad + range_bad + majorant_bad == 0;
  return {ok, "failures of 1000: hausdorff axioms " + std::to_string(hausdorff_bad) + ", theta invariance " +
                  std::to_string(invariance_bad) + " (worst " + fmt(worst_invariance) + "), beta <= theta " +
                  std::to_string(beta_bad) + ", theta in [0,1] " + std::to_string(range_bad) + ", majorant " +
                  std::to_string(majorant_bad)};
}

std::string full_suite_dump() {
  using ex::Json;
  const std::vector<std::pair<std::string, Json>> runs{
      {"lemma_suite", {{"count", 10}}},
      {"flatness_vs_bound", {{"map", "rotation_30deg"}, {"centers", 8}, {"closed_form_H_tilde", 0.0}}},
      {"dimension_bound_check", {{"map", "radial_blend_0.8"}, {"curve_samples", 4096}, {"centers", 4}, {"qs_triples", 4000}}},
      {"curve_dimension", {{"generations", 7}}},
      {"thm31_sweep", {{"qs_triples", 20000}}},
      {"kh_chain", {{"dilatation_samples", 5000}, {"triples", 20000}}},
      {"rectifiability_pipeline",
       {{"map", "radial_blend_0.8"}, {"curve_samples", 8192}, {"centers", 4}, {"dilatation_samples", 2000}, {"qs_triples", 2000}}},
      {"rectifiability_pipeline", {{"angles", "power:1,1"}, {"generations", 6}}}};
  std::string out;
  for (const auto& [name, params] : runs) out += ex::run_named(name, params, 7).to_json(false).dump() + "\n";
  return out;
}

Outcome determinism() {
  const std::string a = full_suite_dump();
  const std::string b = full_suite_dump();
  set_thread_count(1);
  const std::string c = full_suite_dump();
  set_thread_count(0);
  const bool ok = a == b && a == c;
  return {ok, std::to_string(a.size()) + " bytes; repeat run " + (a == b ? "identical" : "differs") +
                  ", single-thread run " + (a == c ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string which;
  app.add_option("--criterion", which, "Run a single criterion by number (e.g. 08)");
  CLI11_PARSE(app, argc, argv);
  int only = 0;
  if (!which.empty()) {
    try {
      only = std::stoi(which);
    } catch (const std::exception&) {
      only = -1;
    }
  }

  const std::vector<Criterion> all{
      {1, "koch_dimension", koch_dimension},
      {2, "dilatation_closed_forms", dilatation_closed_forms},
      {3, "weak_qs_oracle", weak_qs_oracle},
      {4, "kh_chain", kh_chain},
      {5, "special_functions", special_functions},
      {6, "flat_lemma_suite", flat_lemma_suite},
      {7, "distortion_ratio", distortion_ratio},
      {8, "dini_quadrature", dini_quadrature},
      {9, "change_of_variables", change_of_variables},
      {10, "snowflake_dichotomy", snowflake_dichotomy},
      {11, "threshold_sweep", threshold_sweep},
      {12, "property_suites", property_suites},
      {13, "determinism", determinism},
  };
  if (!which.empty() && (only < 1 || only > static_cast<int>(all.size()))) {
    std::cerr << "no criterion " << which << "\n";
    return 2;
  }
  bool all_pass = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << (c.id < 10 ? "0" : "") << c.id << " " << c.name << ": " << o.detail
              << std::endl;
  }
  return all_pass ? 0 : 1;
}
