#include "qsphere/experiments.hpp"
#include "qsphere/parallel.hpp"
#include "qsphere/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace qsphere;
using namespace qsphere::experiments;
using maps::MapSpec;

namespace {

Mat diag3(double a, double b, double c) {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("flat lemma on the identity and near-isometries") {
    const auto id = lemma_flat_check(MapSpec::identity(2), 0.0);
    CHECK(id.status == Status::pass);
    CHECK(id.measured.at("theta").get<double>() <= id.measured.at("resolution").get<double>());

    LemmaOptions o;
    o.closed_form_H = 1.02;
    const auto s = lemma_flat_check(MapSpec::linear(diag3(1, 1.02, 1)), 0.02, o);
    CHECK(s.status == Status::pass);
    CHECK(s.margin >= 0);
  }

  TEST_CASE("flat lemma guards") {
    LemmaOptions o;
    o.closed_form_H = 1.2;
    CHECK(lemma_flat_check(MapSpec::linear(diag3(1, 1.2, 1)), 0.05, o).status == Status::not_applicable);
    CHECK(lemma_flat_check(MapSpec::identity(2), 0.1).status == Status::not_applicable);
    CHECK(lemma_flat_check(MapSpec::translation(make_point({0.1, 0})), 0.0).status == Status::not_applicable);
  }

  TEST_CASE("normalized linear family") {
    const auto fam = normalized_linear_family(12, 0.05, 3);
    CHECK(fam.size() == 12);
    for (const auto& m : fam) {
      CHECK(m.H <= 1.05 + 1e-12);
      const Point e1 = unit_vector(m.map.dim, 0);
      CHECK((maps::evaluate(m.map, e1) - e1).norm() < 1e-12);
    }
    CHECK(lemma_suite(12, 0.05, 3).status == Status::pass);
  }

  TEST_CASE("threshold sweep on the linear family") {
    SweepOptions so;
    so.qs_triples = 50000;
    const auto r = thm31_sweep("linear", {1.05, 1.1, 1.2}, so);
    CHECK(r.status == Status::pass);
    CHECK_THROWS_AS(thm31_sweep("spiral", {1.1}, so), Error);
  }

  TEST_CASE("flatness against the bound is similarity invariant") {
    const auto centers = sphere_sampler(2, 8);
    FlatnessBoundOptions fo;
    fo.closed_form_H_tilde = 0.0;
    const std::vector<double> ts{0.2, 0.1, 0.05};
    const auto id = flatness_vs_bound(MapSpec::identity(2), centers, ts, fo);
    const auto sim = flatness_vs_bound(maps::builtin_map("rotation_30deg"), centers, ts, fo);
    REQUIRE(id.status == Status::pass);
    REQUIRE(sim.status == Status::pass);
    const auto a = id.measured.at("sup_theta"), b = sim.measured.at("sup_theta");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].get<double>() - b[i].get<double>()) < 1e-9);
  }

  TEST_CASE("flatness bound is not applicable beyond the distortion limit") {
    FlatnessBoundOptions fo;
    fo.closed_form_H_tilde = 0.1;
    const auto r = flatness_vs_bound(maps::builtin_map("radial_0.8"), sphere_sampler(2, 4), {0.2, 0.1}, fo);
    CHECK(r.status == Status::not_applicable);
  }

  TEST_CASE("pipelines agree on the identity and on snowflakes") {
    PipelineOptions po;
    po.curve_samples = 1u << 14;
    po.centers = 8;
    po.dilatation_samples = 2000;
    po.qs_triples = 2000;
    const auto id = rectifiability_pipeline(MapSpec::identity(2), po);
    CHECK(id.status == Status::pass);
    CHECK(id.measured.at("agreement") == true);

    po.generations = 6;
    const auto fin = rectifiability_pipeline(gen::AngleSchedule::power(1.0, 1.0, 6), po);
    CHECK(fin.measured.at("theta_verdict") == "finite");
    CHECK(fin.measured.at("length_verdict") == "finite");
    const auto div = rectifiability_pipeline(gen::AngleSchedule::constant(kPi / 6, 6), po);
    CHECK(div.measured.at("theta_verdict") == "divergent");
    CHECK(div.measured.at("length_verdict") == "divergent");
    CHECK(div.status == Status::pass);
  }

  TEST_CASE("schedule helpers") {
    const auto theta = schedule_theta_of_u(gen::AngleSchedule::constant(0.3, 5));
    CHECK(theta(0.5) == doctest::Approx(0.3));
    CHECK(theta(1e4) == doctest::Approx(0.3));
    CHECK(length_trend(gen::AngleSchedule::power(1.0, 1.0, 1)).verdict == dini::Verdict::finite);
    CHECK(length_trend(gen::AngleSchedule::power(1.0, 0.5, 1)).verdict == dini::Verdict::divergent);
  }

  TEST_CASE("named runs and determinism across thread counts") {
    const Json p{{"count", 6}};
    const auto a = run_named("lemma_suite", p, 9).to_json(false).dump();
    set_thread_count(1);
    const auto b = run_named("lemma_suite", p, 9).to_json(false).dump();
    set_thread_count(0);
    CHECK(a == b);
    CHECK(run_named("curve_dimension", Json{{"generations", 7}}, 1).status == Status::pass);
    CHECK_THROWS_AS(run_named("nope", Json::object(), 1), Error);
    CHECK_THROWS_AS(run_named("lemma_suite", Json{{"count", "x"}}, 1), Error);
    CHECK(experiment_names().size() == 8);
  }

  TEST_CASE("report documents") {
    ExperimentReport r;
    r.name = "x";
    r.status = Status::not_applicable;
    r.margin = -std::numeric_limits<double>::infinity();
    const auto j = r.to_json();
    CHECK(j.at("header").at("tool") == "qsphere");
    CHECK(j.at("status") == "not applicable");
    CHECK(j.at("margin") == "-inf");
  }
}
