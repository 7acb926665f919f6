#include "helpers.hpp"
#include "qsphere/dilatation.hpp"
#include "qsphere/maps.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace qsphere;
using namespace qsphere::maps;
using namespace testing;

namespace {

Mat diag(std::initializer_list<double> d) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

std::vector<MapSpec> variants() {
  return {MapSpec::identity(2),
          MapSpec::linear(diag({2, 1})),
          MapSpec::radial_stretch(2, 0.5),
          MapSpec::radial_stretch(3, 1.3),
          MapSpec::radial_blend(2, 1.0, 0.8, 1.1, 1.5),
          MapSpec::translation(make_point({0.3, -0.1, 0.2})),
          builtin_map("similarity_diag_radial"),
          builtin_map("shear_0.5")};
}

}  // namespace

TEST_SUITE("maps") {
  TEST_CASE("evaluation examples") {
    const auto x = make_point({0.3, -0.7});
    CHECK((evaluate(MapSpec::identity(2), x) - x).norm() == 0.0);
    CHECK((evaluate(MapSpec::radial_stretch(2, 0.5), make_point({4, 0})) - make_point({2, 0})).norm() < 1e-15);
    CHECK((evaluate(MapSpec::linear(diag({2, 1})), make_point({1, 1})) - make_point({2, 1})).norm() == 0.0);
    CHECK(evaluate(MapSpec::radial_stretch(2, 0.5), make_point({0, 0})).norm() == 0.0);
  }

  TEST_CASE("composites apply the last part first") {
    const auto t = MapSpec::translation(make_point({1, 0}));
    const auto s = MapSpec::linear(diag({2, 2}));
    const auto ts = MapSpec::composite({t, s});
    CHECK((evaluate(ts, make_point({1, 1})) - make_point({3, 2})).norm() < 1e-15);
  }

  TEST_CASE("closed-form jacobians") {
    CHECK((jacobian(MapSpec::identity(3), make_point({1, 2, 3})) - Mat::Identity(3, 3)).norm() == 0.0);
    const Mat a = diag({2, 1});
    CHECK((jacobian(MapSpec::linear(a), make_point({5, -4})) - a).norm() == 0.0);
    for (double ex : {0.5, 0.8, 1.25}) {
      const Mat j = jacobian(MapSpec::radial_stretch(2, ex), make_point({1, 0}));
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
      const auto sv = svd.singularValues();
      CHECK(sv.maxCoeff() == doctest::Approx(std::max(1.0, ex)).epsilon(1e-14));
      CHECK(sv.minCoeff() == doctest::Approx(std::min(1.0, ex)).epsilon(1e-14));
    }
    CHECK_THROWS_WITH_AS(jacobian(MapSpec::radial_stretch(2, 0.5), make_point({0, 0})),
                         "jacobian undefined at origin", Error);
  }

  TEST_CASE("finite differences agree with the closed form on 1000 points per variant") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& f : variants()) {
      double worst = 0;
      for (int k = 0; k < 1000; ++k) {
        Point x(f.dim);
        for (int i = 0; i < f.dim; ++i) x(i) = u(rng);
        if (x.norm() < 0.05) continue;
        const Mat j = jacobian(f, x), fd = jacobian_fd(f, x);
        worst = std::max(worst, (j - fd).norm() / j.norm());
      }
      CHECK(worst < 1e-6);
    }
  }

  TEST_CASE("validation errors") {
    CHECK_THROWS_AS(MapSpec::linear(diag({1, 0})), Error);
    CHECK_THROWS_AS(MapSpec::radial_stretch(2, 0.0), Error);
    CHECK_THROWS_AS(MapSpec::radial_stretch(2, -1.0), Error);
    CHECK_THROWS_AS(MapSpec::composite({}), Error);
    CHECK_THROWS_AS(MapSpec::composite({MapSpec::identity(2), MapSpec::identity(3)}), Error);
    CHECK_THROWS_AS(evaluate(MapSpec::identity(2), make_point({1, 2, 3})), Error);
    CHECK_THROWS_AS(builtin_map("nope"), Error);
  }

  TEST_CASE("twelve built-in maps with unique names") {
    const auto all = builtin_maps();
    CHECK(all.size() == 12);
    std::set<std::string> names;
    for (const auto& m : all) {
      names.insert(m.name);
      CHECK_NOTHROW(m.map.validate());
    }
    CHECK(names.size() == 12);
  }

  TEST_CASE("dilatation closed forms") {
    const BallRegion unit{make_point({0, 0}), 1.0};
    CHECK(dilatation(MapSpec::identity(2), unit, 2000).K == doctest::Approx(1.0).epsilon(1e-14));
    const auto d = dilatation(MapSpec::linear(diag({2, 1})), unit, 2000);
    CHECK(std::abs(d.K - 2) < 1e-9);
    CHECK(d.K_tilde == d.K - 1);
    const auto r = dilatation(MapSpec::radial_stretch(2, 0.5), AnnulusRegion{0.5}, 20000);
    CHECK(std::abs(r.K - 2) < 1e-6);
    const auto r3 = dilatation(MapSpec::radial_stretch(3, 0.9), AnnulusRegion{0.3}, 5000);
    CHECK(r3.K == doctest::Approx(1 / 0.81).epsilon(1e-12));
  }

  TEST_CASE("annulus profiles") {
    const std::vector<double> ts{0.05, 0.1, 0.2, 0.4};
    for (const auto& p : annulus_dilatation_profile(MapSpec::identity(2), ts, 2000)) CHECK(p.K_tilde < 1e-12);
    for (const auto& p : annulus_dilatation_profile(MapSpec::radial_stretch(2, 0.8), ts, 2000))
      CHECK(p.K_tilde == doctest::Approx(1 / 0.8 - 1).epsilon(1e-12));
    for (const auto& p : annulus_dilatation_profile(MapSpec::radial_stretch(3, 0.8), ts, 2000))
      CHECK(p.K_tilde == doctest::Approx(std::pow(0.8, -2.0) - 1).epsilon(1e-12));
    const auto blend = annulus_dilatation_profile(builtin_map("radial_blend_0.8"), {0.02, 0.05, 0.09, 0.3, 0.6}, 5000);
    CHECK(blend[0].K_tilde < 1e-12);
    CHECK(blend[2].K_tilde < 1e-12);
    CHECK(blend[3].K_tilde > 0.01);
    for (std::size_t i = 1; i < blend.size(); ++i) CHECK(blend[i].K_tilde >= blend[i - 1].K_tilde - 1e-9);
  }

  TEST_CASE("dilatation properties") {
    std::mt19937_64 rng(8);
    const BallRegion ball{make_point({0.4, 0.2}), 0.8};
    const std::vector<MapSpec> planar{MapSpec::linear(diag({2, 1})), MapSpec::radial_stretch(2, 0.7),
                                      builtin_map("shear_0.5"), MapSpec::radial_blend(2, 1.0, 0.8, 0.5, 1.0)};
    for (const auto& f : planar) {
      const double kf = dilatation(f, ball, 3000).K;
      CHECK(kf >= 1.0);
      // Similarities on either side leave K unchanged.
      const Mat q = random_rotation(rng, 2);
      const auto pre_ball = BallRegion{Point(q.transpose() * ball.center / 2.5), ball.radius / 2.5};
      const auto conj = MapSpec::composite({MapSpec::linear(0.3 * random_rotation(rng, 2)), f, MapSpec::linear(2.5 * q)});
      const double kc = dilatation(conj, pre_ball, 3000).K;
      CHECK(std::abs(kc - kf) <= 1e-12 * kf);
    }
    for (const auto& f : planar)
      for (const auto& g : planar) {
        const double kfg = dilatation(MapSpec::composite({f, g}), ball, 3000).K;
        // K_f is taken over the image region of g, approximated by a ball containing it.
        const double kf = dilatation(f, BallRegion{make_point({0, 0}), 5.0}, 20000).K;
        const double kg = dilatation(g, ball, 3000).K;
        CHECK(kfg <= kf * kg * (1 + 1e-9));
      }
  }

  TEST_CASE("degenerate jacobian is reported") {
    // A large exponent underflows the determinant near the origin.
    const auto f = MapSpec::radial_stretch(2, 50.0);
    CHECK_THROWS_WITH_AS(dilatation(f, BallRegion{make_point({0, 0}), 1e-10}, 100), "degenerate Jacobian", Error);
  }
}
