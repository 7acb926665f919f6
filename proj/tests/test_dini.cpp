#include "qsphere/dini.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace qsphere;
using namespace qsphere::dini;

namespace {

ScaleProfile analytic(std::function<double(double)> of_u, double t_max = 0.5) {
  return ScaleProfile::analytic(std::move(of_u), 1e-12, t_max);
}

ScaleProfile sampled(const std::function<double(double)>& g, double t_min, double t_max, int count) {
  std::vector<double> t, v;
  for (int k = 0; k < count; ++k) {
    const double x = t_min * std::pow(t_max / t_min, k / static_cast<double>(count - 1));
    t.push_back(x);
    v.push_back(g(x));
  }
  t.back() = t_max;
  return ScaleProfile::measured(std::move(t), std::move(v));
}

DiniOptions opts(double p, bool log_weighted, double t_max = 1.0) {
  DiniOptions o;
  o.p = p;
  o.log_weighted = log_weighted;
  o.t_max = t_max;
  return o;
}

}  // namespace

TEST_SUITE("dini") {
  TEST_CASE("closed-form examples") {
    const auto sqrt_t = analytic([](double u) { return std::exp(-u / 2); }, 1.0);
    const auto r = dini_integral(sqrt_t, opts(2, true));
    CHECK(r.verdict == Verdict::finite);
    CHECK(std::abs(r.value - 0.5) < 1e-4);

    const auto t = analytic([](double u) { return std::exp(-u); }, 1.0);
    const auto r1 = dini_integral(t, opts(1, false));
    CHECK(r1.verdict == Verdict::finite);
    CHECK(std::abs(r1.value - 1.0) < 1e-4);

    const auto konst = analytic([](double) { return 0.3; }, 1.0);
    const auto rc = dini_integral(konst, opts(2, false));
    CHECK(rc.verdict == Verdict::divergent);
    CHECK(rc.infinite);
    CHECK(std::isinf(rc.value));
  }

  TEST_CASE("logarithmic profiles") {
    // 1/u: (log u / u)^2 du is integrable; 1/sqrt(u): du/u is not.
    const auto inv_log = analytic([](double u) { return 1 / u; }, 0.01);
    CHECK(dini_integral(inv_log, opts(2, true, 0.01)).verdict == Verdict::finite);
    CHECK(dini_integral(inv_log, opts(2, false, 0.01)).verdict == Verdict::finite);
    const auto inv_sqrt_log = analytic([](double u) { return 1 / std::sqrt(u); }, 0.01);
    CHECK(dini_integral(inv_sqrt_log, opts(2, false, 0.01)).verdict == Verdict::divergent);
    CHECK(dini_integral(inv_sqrt_log, opts(2, true, 0.01)).verdict == Verdict::divergent);
  }

  TEST_CASE("finite ranges") {
    auto o = opts(2, false, 0.5);
    o.t_min = 1e-3;
    const auto r = dini_integral(analytic([](double u) { return std::exp(-u / 2); }), o);
    CHECK(r.verdict == Verdict::finite);
    CHECK(r.value == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
  }

  TEST_CASE("halving the grid step changes analytic integrals by < 1e-6") {
    const std::vector<std::pair<ScaleProfile, DiniOptions>> cases{
        {analytic([](double u) { return std::exp(-u / 2); }, 1.0), opts(2, true)},
        {analytic([](double u) { return std::exp(-u); }, 1.0), opts(1, false)},
        {analytic([](double u) { return 1 / u; }, 0.01), opts(2, true, 0.01)}};
    for (auto [g, o] : cases) {
      const double a = dini_integral(g, o).value;
      o.nodes *= 2;
      CHECK(std::abs(dini_integral(g, o).value - a) < 1e-6);
    }
  }

  TEST_CASE("monotone in the profile") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> t, g1, g2;
      for (int k = 0; k < 13; ++k) {
        t.push_back(std::pow(10.0, -4 + k / 3.0));
        const double a = 0.5 * u(rng), b = a + 0.4 * u(rng);
        g1.push_back(a);
        g2.push_back(b);
      }
      const bool lw = trial % 2 == 0;
      const auto o = opts(trial % 3 == 0 ? 1.5 : 2.0, lw);
      const double v1 = dini_integral(ScaleProfile::measured(t, g1), o).value;
      const double v2 = dini_integral(ScaleProfile::measured(t, g2), o).value;
      // x log(1/x) increases only on (0, 1/e).
      if (lw) {
        bool in_range = true;
        for (double x : g2) in_range = in_range && x <= std::exp(-1.0);
        if (!in_range) continue;
      }
      CHECK(v1 <= v2 + 1e-15);
    }
  }

  TEST_CASE("measured profiles") {
    const auto konst = sampled([](double) { return 0.2; }, 1e-4, 1.0, 41);
    const auto rc = dini_integral(konst, opts(2, false));
    CHECK(rc.verdict == Verdict::divergent);
    const auto root = sampled([](double t) { return std::sqrt(t); }, 1e-4, 1.0, 41);
    const auto rr = dini_integral(root, opts(2, false));
    CHECK(rr.verdict == Verdict::finite);
    // Linear interpolation in u between samples a tenth of a decade apart.
    CHECK(rr.value == doctest::Approx(1.0 - 1e-4).epsilon(1e-2));
    const auto shorty = sampled([](double t) { return std::sqrt(t); }, 0.05, 1.0, 11);
    const auto rs = dini_integral(shorty, opts(2, false));
    CHECK(rs.verdict == Verdict::inconclusive);
    CHECK(rs.diagnostic == "sampled range spans fewer than 2 decades");
  }

  TEST_CASE("errors") {
    CHECK_THROWS_WITH_AS(dini_integral(ScaleProfile::measured({0.1, 0.5}, {0.1, -0.2})),
                         "profile values must be finite and non-negative", Error);
    CHECK_THROWS_AS(dini_integral(ScaleProfile::measured({0.5, 0.1}, {0.1, 0.2})), Error);
    CHECK_THROWS_WITH_AS(dini_integral(analytic([](double) { return 1.5; }, 1.0), opts(2, true)),
                         "log weight undefined: profile value exceeds 1", Error);
    auto o = opts(2, false);
    o.p = 0;
    CHECK_THROWS_AS(dini_integral(analytic([](double) { return 0.1; }), o), Error);
  }

  TEST_CASE("tail rule") {
    CHECK(judge_tail(1.0, 1.0, 10.0, 1e-3).verdict == Verdict::divergent);
    CHECK(judge_tail(1.0, 1e-4, 10.0, 1e-3).verdict == Verdict::finite);
    CHECK(judge_tail(1.0, 0.5, 10.0, 1e-3).verdict == Verdict::inconclusive);
    CHECK(judge_tail(1.0, 0.5, 10.0, 1e-3).tail == doctest::Approx(0.05));
    CHECK(judge_tail(0.0, 0.0, 0.0, 1e-3).verdict == Verdict::finite);
  }

  TEST_CASE("majorant examples") {
    const auto inc = build_majorant(ScaleProfile::measured({0.1, 0.2, 0.4}, {0.01, 0.02, 0.05}));
    CHECK(inc.b == 1.0);
    CHECK(inc.value == std::vector<double>{0.01, 0.02, 0.05});
    const auto dip = build_majorant(ScaleProfile::measured({0.1, 0.2, 0.3}, {0.1, 0.05, 0.3}));
    CHECK(dip.value == std::vector<double>{0.1, 0.1, 0.3});
    CHECK(dip.b == doctest::Approx(2.0));
    const auto zero = build_majorant(ScaleProfile::measured({0.01, 0.1}, {0.0, 0.0}));
    CHECK(zero.zero_profile);
    CHECK(zero(0.05) == doctest::Approx(0.05));
    const auto spike = build_majorant(ScaleProfile::measured({0.1, 0.2}, {0.5, 0.0}));
    CHECK(spike.b_infinite);
  }

  TEST_CASE("majorant contract on 1000 random profiles") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.001, 1);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> t, g;
      for (int k = 0; k < 20; ++k) {
        t.push_back(std::pow(10.0, -3 + 3 * k / 19.0));
        g.push_back(u(rng) * t.back());
      }
      const auto m = build_majorant(ScaleProfile::measured(t, g), 1e3);
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(m.value[i] >= g[i]);
        CHECK(m(t[i]) == doctest::Approx(m.value[i]).epsilon(1e-12));
        if (!m.b_infinite) CHECK(m.value[i] <= m.b * g[i] * (1 + 1e-12));
        if (i > 0) CHECK(m.value[i] >= m.value[i - 1]);
      }
    }
  }

  TEST_CASE("change of variables") {
    const ChangeOfVariables lin([](double t) { return 2 * t; }, [](double) { return 2.0; }, 2.0);
    for (double t : {0.01, 0.1, 0.5}) {
      CHECK(lin.phi(t) == doctest::Approx(t * std::pow(t, 1 / t)).epsilon(1e-12));
      CHECK(lin.log_derivative(t) == doctest::Approx(lin.log_derivative_fd(t)).epsilon(1e-5));
    }
    const ChangeOfVariables flat([](double) { return 0.3; }, [](double) { return 0.0; }, 2.0);
    for (double t : {1e-4, 0.01, 0.3}) {
      CHECK(flat.log_derivative(t) == 1 / t);
      CHECK(flat.phi(t) == doctest::Approx(t * std::pow(0.15, 2 / 0.3)).epsilon(1e-12));
    }
    const ChangeOfVariables root([](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); },
                                 2.0);
    // φ itself underflows at the small end, so monotonicity is checked on log φ.
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 100; ++k) {
      const double t = std::pow(10.0, -4 + k * std::log10(5e3) / 100);
      CHECK(std::abs(root.log_derivative_fd(t) / root.log_derivative(t) - 1) < 1e-5);
      const double p = root.log_phi(t);
      CHECK(p > prev);
      prev = p;
    }
    CHECK_THROWS_AS(ChangeOfVariables([](double) { return 0.1; }, [](double) { return 0.0; }, 1.0), Error);
    CHECK_THROWS_AS((void)root.phi(4.0), Error);
  }

  TEST_CASE("majorant-based change of variables matches finite differences off knots") {
    const auto m = build_majorant(sampled([](double t) { return std::sqrt(t); }, 1e-4, 0.5, 9));
    const auto cov = ChangeOfVariables::from_majorant(m, 2.0);
    for (std::size_t j = 0; j + 1 < m.t.size(); ++j) {
      const double t = std::sqrt(m.t[j] * m.t[j + 1]);
      CHECK(std::abs(cov.log_derivative_fd(t) / cov.log_derivative(t) - 1) < 1e-5);
    }
  }

  TEST_CASE("two-term decomposition") {
    const ChangeOfVariables root([](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); },
                                 2.0);
    const auto s = two_term_decomposition(root, 1e-4, 0.5);
    CHECK(std::abs(s.total - (s.m_term + s.psi_term)) < 1e-4);
    CHECK(s.m_term > 0);
  }

  TEST_CASE("rectifiability classification") {
    const auto zero = sampled([](double) { return 0.0; }, 1e-4, 0.5, 30);
    const auto z = classify_rectifiability(zero, zero);
    CHECK(z.thm_asymptotic == Verdict::finite);
    CHECK(z.thm_weak_qs == Verdict::finite);
    CHECK(yes_no(z.thm_asymptotic) == "yes");

    const auto inv_log = analytic([](double u) { return 1 / u; }, 0.01);
    CHECK(classify_rectifiability(inv_log, std::nullopt).thm_asymptotic == Verdict::finite);
    const auto inv_sqrt = analytic([](double u) { return 1 / std::sqrt(u); }, 0.01);
    const auto d = classify_rectifiability(inv_sqrt, inv_sqrt);
    CHECK(d.thm_asymptotic == Verdict::divergent);
    CHECK(d.thm_weak_qs == Verdict::divergent);
    CHECK(yes_no(d.thm_weak_qs) == "no");

    const auto shorty = sampled([](double t) { return 0.1 * t; }, 0.05, 0.5, 10);
    const auto s = classify_rectifiability(shorty, std::nullopt);
    CHECK(s.thm_asymptotic == Verdict::inconclusive);
    CHECK(s.diagnostic == "profile spans fewer than 2 decades");
  }
}
