#include "helpers.hpp"
#include "qsphere/quasisymmetry.hpp"

#include <doctest.h>

#include <random>

using namespace qsphere;
using namespace qsphere::maps;
using namespace qsphere::qs;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("quasisymmetry") {
  TEST_CASE("similarities have H = 1") {
    const auto id = weak_qs_constant(MapSpec::identity(2), make_point({0, 0}), 1.0, 20000, 3);
    CHECK(id.H == doctest::Approx(1.0).epsilon(1e-12));
    const auto sim = weak_qs_constant(builtin_map("rotation_30deg"), make_point({0.2, 0.1}), 0.7, 20000, 3);
    CHECK(sim.H == doctest::Approx(1.0).epsilon(1e-12));
    const auto id3 = weak_qs_constant(MapSpec::identity(3), make_point({0, 0, 0}), 1.0, 20000, 3);
    CHECK(id3.H == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("diag(2,1) is close to 2 from below") {
    const auto e = weak_qs_constant(MapSpec::linear(diag2(2, 1)), make_point({0, 0}), 1.0, 100000, 5);
    CHECK(e.H <= 2.0 + 1e-12);
    CHECK(e.H >= 1.96);
    CHECK(e.H_tilde == doctest::Approx(e.H - 1));
    const auto& [x, y, z] = e.witness;
    CHECK((x - y).norm() <= (x - z).norm() + 1e-12);
    CHECK(e.used_count <= e.triple_count);
  }

  TEST_CASE("deterministic in the seed") {
    const auto f = builtin_map("radial_0.5");
    const auto a = weak_qs_constant(f, make_point({0.3, 0}), 0.5, 5000, 11);
    const auto b = weak_qs_constant(f, make_point({0.3, 0}), 0.5, 5000, 11);
    CHECK(a.H == b.H);
    CHECK(a.witness[0] == b.witness[0]);
  }

  TEST_CASE("nested estimates are monotone in the radius") {
    const auto f = builtin_map("radial_blend_0.8");
    const Point c = make_point({1.0, 0.2});
    QsOptions opts;
    opts.nested_radius = 1.0;
    double prev = 0;
    for (double r : {0.4, 0.6, 0.8, 1.0}) {
      const double h = weak_qs_constant(f, c, r, 200000, 2, opts).H;
      CHECK(h >= prev);
      prev = h;
    }
    opts.nested_radius = 0.5;
    CHECK_THROWS_AS(weak_qs_constant(f, c, 1.0, 100, 2, opts), Error);
  }

  TEST_CASE("argument errors") {
    const auto f = MapSpec::identity(2);
    CHECK_THROWS_AS(weak_qs_constant(f, make_point({0, 0}), 0.0, 10, 1), Error);
    CHECK_THROWS_AS(weak_qs_constant(f, make_point({0, 0}), 1.0, 0, 1), Error);
    CHECK_THROWS_AS(weak_qs_constant(f, make_point({0, 0, 0}), 1.0, 10, 1), Error);
  }

  TEST_CASE("K <= H^(n-1) on sample balls") {
    const auto r = check_KH_inequality(builtin_map("radial_0.8"), BallRegion{make_point({1, 0}), 0.5}, 20000, 50000);
    CHECK(r.pass);
    CHECK(r.bound == doctest::Approx(r.H));
    const auto d = check_KH_inequality(MapSpec::linear(diag2(2, 1)), BallRegion{make_point({0, 0}), 1.0}, 2000, 50000);
    CHECK(d.pass);
    CHECK(d.K == doctest::Approx(2.0));
    const auto s = check_KH_inequality(builtin_map("diag_1.2_1_0.9"), BallRegion{make_point({0, 0, 0}), 1.0}, 2000, 50000);
    CHECK(s.pass);
  }

  TEST_CASE("standardization fixes 0 and e1 and maps into the unit ball") {
    for (const std::string name : {"identity_2d", "rotation_30deg", "similarity_diag_radial", "diag_2_1",
                                   "radial_0.8", "identity_3d", "diag_1.2_1_0.9"}) {
      INFO(name);
      const auto f = builtin_map(name);
      const Point c = f.dim == 2 ? make_point({0.4, -0.3}) : make_point({0.1, 0.2, -0.3});
      const auto s = standardize(f, c, 0.6);
      const Point e1 = unit_vector(f.dim, 0);
      CHECK(s(Point::Zero(f.dim)).norm() < 1e-9);
      CHECK((s(e1) - e1).norm() < 1e-9);
      CHECK((evaluate(s.composed, e1) - s(e1)).norm() < 1e-12);
      CHECK((s.pre_rotation.transpose() * s.pre_rotation - Mat::Identity(f.dim, f.dim)).norm() < 1e-12);
      CHECK((s.pivot - c).norm() == doctest::Approx(0.6));
      CHECK(extremal_quotient(s.composed) >= 1.0);
    }
  }

  TEST_CASE("standardizing diag(2,1) pivots on the long axis") {
    const auto s = standardize(MapSpec::linear(diag2(2, 1)), make_point({0, 0}), 1.0);
    CHECK(std::abs(std::abs(s.pivot(0)) - 1) < 1e-9);
    CHECK(s.image_radius == doctest::Approx(2.0));
    CHECK(extremal_quotient(s.composed) == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("extremal quotient examples") {
    CHECK(extremal_quotient(MapSpec::linear(diag2(1, 0.5))) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(extremal_quotient(MapSpec::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(extremal_quotient(MapSpec::radial_stretch(2, 0.3)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
