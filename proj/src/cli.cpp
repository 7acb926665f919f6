#include "qsphere/cli.hpp"

#include "qsphere/dilatation.hpp"
#include "qsphere/experiments.hpp"
#include "qsphere/flatness.hpp"
#include "qsphere/generators.hpp"
#include "qsphere/io.hpp"
#include "qsphere/quasisymmetry.hpp"
#include "qsphere/sampling.hpp"
#include "qsphere/special_functions.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace qsphere::cli {

namespace {

using io::Json;

// Writes to --out when given, otherwise to the command's output stream.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("write failed: " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

// A built-in name or a path to a mapspec-v1 document.
maps::MapSpec resolve_map(const std::string& arg) {
  if (std::filesystem::exists(arg)) return io::map_from_json(read_json_file(arg));
  return maps::builtin_map(arg);
}

Point to_point(const std::vector<double>& v) {
  if (v.empty() || v.size() > 3) throw Error("points need 1 to 3 coordinates");
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasisphere flatness, distortion and rectifiability toolkit", "qsphere"};
  app.require_subcommand(1);
  std::function<void()> action;

  // version
  auto* version = app.add_subcommand("version", "Print the version");
  version->callback([&] { action = [&] { out << kVersion << "\n"; }; });

  // generate
  auto* generate = app.add_subcommand("generate", "Generate point sets");
  generate->require_subcommand(1);
  struct {
    std::string angles = "const:60deg", out;
    int generations = 3;
    bool closed = false;
    int n = 2;
    std::size_t count = 1000;
    double t = 0.5;
    std::uint64_t seed = 0;
  } gen_args;
  auto* g_snow = generate->add_subcommand("snowflake", "Variable-angle snowflake polyline");
  g_snow->add_option("--angles", gen_args.angles, "const:60deg | power:c,q | list:a,b,...");
  g_snow->add_option("--generations", gen_args.generations)->check(CLI::NonNegativeNumber);
  g_snow->add_flag("--closed", gen_args.closed, "Start from a triangle instead of the unit segment");
  g_snow->add_option("--out", gen_args.out);
  g_snow->callback([&] {
    action = [&] {
      const auto s = gen::AngleSchedule::parse(gen_args.angles, gen_args.generations);
      const auto c = gen::snowflake(s, gen_args.closed);
      std::ostringstream os;
      io::write_pointset_csv(os, c.polyline);
      emit(gen_args.out, out, os.str());
    };
  });
  auto* g_sphere = generate->add_subcommand("sphere", "Deterministic points on the unit sphere");
  g_sphere->add_option("--n", gen_args.n)->check(CLI::Range(2, 3));
  g_sphere->add_option("--count", gen_args.count)->check(CLI::PositiveNumber);
  g_sphere->add_option("--seed", gen_args.seed);
  g_sphere->add_option("--out", gen_args.out);
  g_sphere->callback([&] {
    action = [&] {
      std::ostringstream os;
      io::write_pointset_csv(os, sphere_sampler(gen_args.n, gen_args.count, gen_args.seed));
      emit(gen_args.out, out, os.str());
    };
  });
  auto* g_annulus = generate->add_subcommand("annulus", "Halton points in the shell 1-t < |x| < 1+t");
  g_annulus->add_option("--n", gen_args.n)->check(CLI::Range(2, 3));
  g_annulus->add_option("--t", gen_args.t);
  g_annulus->add_option("--count", gen_args.count)->check(CLI::PositiveNumber);
  g_annulus->add_option("--seed", gen_args.seed);
  g_annulus->add_option("--out", gen_args.out);
  g_annulus->callback([&] {
    action = [&] {
      std::ostringstream os;
      io::write_pointset_csv(os, annulus_sampler(gen_args.n, gen_args.t, gen_args.count, gen_args.seed));
      emit(gen_args.out, out, os.str());
    };
  });

  // flatness
  struct {
    std::string in, out;
    std::vector<double> scales;
    std::size_t stride = 1;
  } fl_args;
  auto* flat = app.add_subcommand("flatness", "Local flatness profile of a point set");
  flat->add_option("--in", fl_args.in, "Point set CSV")->required();
  flat->add_option("--scales", fl_args.scales, "Descending radii")->delimiter(',')->required();
  flat->add_option("--center-stride", fl_args.stride, "Use every k-th point as a center")
      ->check(CLI::PositiveNumber);
  flat->add_option("--out", fl_args.out);
  flat->callback([&] {
    action = [&] {
      const PointSet s = io::read_pointset_file(fl_args.in);
      std::vector<Point> centers;
      for (std::size_t i = 0; i < s.size(); i += fl_args.stride) centers.push_back(s[i]);
      const auto prof = flatness::reifenberg_profile(s, centers, fl_args.scales);
      std::ostringstream os;
      io::write_profile_csv(os, prof, s.dim);
      emit(fl_args.out, out, os.str());
      if (!prof.missing.empty()) err << prof.missing.size() << " (center, scale) pairs had no points\n";
    };
  });

  // qs
  struct {
    std::string map = "identity_2d", out;
    std::vector<double> center;
    double radius = 1.0;
    std::size_t triples = 200000;
    std::uint64_t seed = 1;
  } qs_args;
  auto* qs_cmd = app.add_subcommand("qs", "Sampled weak quasisymmetry constant on a ball");
  qs_cmd->add_option("--map", qs_args.map, "Built-in map name or mapspec-v1 JSON file");
  qs_cmd->add_option("--center", qs_args.center)->delimiter(',');
  qs_cmd->add_option("--radius", qs_args.radius);
  qs_cmd->add_option("--triples", qs_args.triples)->check(CLI::PositiveNumber);
  qs_cmd->add_option("--seed", qs_args.seed);
  qs_cmd->add_option("--out", qs_args.out);
  qs_cmd->callback([&] {
    action = [&] {
      const auto f = resolve_map(qs_args.map);
      const Point c = qs_args.center.empty() ? Point(Point::Zero(f.dim)) : to_point(qs_args.center);
      const auto est = qs::weak_qs_constant(f, c, qs_args.radius, qs_args.triples, qs_args.seed);
      Json j = io::to_json(est);
      j["map"] = io::map_to_json(f);
      j["center"] = io::point_to_json(c);
      j["radius"] = qs_args.radius;
      emit(qs_args.out, out, dump(j));
    };
  });

  // dilatation
  struct {
    std::string map = "identity_2d", out;
    std::vector<double> center;
    double radius = 1.0;
    std::optional<double> annulus;
    std::size_t samples = 100000;
  } dil_args;
  auto* dil = app.add_subcommand("dilatation", "Sampled maximal dilatation on a ball or annulus");
  dil->add_option("--map", dil_args.map, "Built-in map name or mapspec-v1 JSON file");
  dil->add_option("--center", dil_args.center, "Ball center")->delimiter(',');
  dil->add_option("--radius", dil_args.radius, "Ball radius");
  dil->add_option("--annulus", dil_args.annulus, "Use the shell 1-t < |x| < 1+t instead");
  dil->add_option("--samples", dil_args.samples)->check(CLI::PositiveNumber);
  dil->add_option("--out", dil_args.out);
  dil->callback([&] {
    action = [&] {
      const auto f = resolve_map(dil_args.map);
      maps::Region region;
      Json rj;
      if (dil_args.annulus) {
        region = maps::AnnulusRegion{*dil_args.annulus};
        rj = {{"annulus_t", *dil_args.annulus}};
      } else {
        const Point c = dil_args.center.empty() ? Point(Point::Zero(f.dim)) : to_point(dil_args.center);
        region = maps::BallRegion{c, dil_args.radius};
        rj = {{"center", io::point_to_json(c)}, {"radius", dil_args.radius}};
      }
      const auto est = maps::dilatation(f, region, dil_args.samples);
      const Json j = {{"map", io::map_to_json(f)},        {"region", rj},
                      {"K", est.K},                        {"K_tilde", est.K_tilde},
                      {"sample_count", est.sample_count}, {"argmax", io::point_to_json(est.argmax)}};
      emit(dil_args.out, out, dump(j));
    };
  });

  // specialfn
  struct {
    std::string fn, out;
    int n = 2;
    double t = 2, s = 1, r = 0.5, R = 2, A = 1.1, K = 1.1, K_prime = 0, M = 10;
    std::optional<double> lambda;
  } sf;
  auto* special = app.add_subcommand("specialfn", "Special functions of ring moduli and distortion");
  special->require_subcommand(1);
  auto* eval = special->add_subcommand("eval", "Evaluate one function");
  eval->add_option("fn", sf.fn, "sigma | gamma | tau | phi | rho | t0 | qsbound | threshold")
      ->required()
      ->check(CLI::IsMember({"sigma", "gamma", "tau", "phi", "rho", "t0", "qsbound", "threshold"}));
  eval->add_option("--n", sf.n)->check(CLI::Range(2, 3));
  eval->add_option("--t", sf.t);
  eval->add_option("--s", sf.s);
  eval->add_option("--r", sf.r);
  eval->add_option("--R", sf.R);
  eval->add_option("--A", sf.A);
  eval->add_option("--K", sf.K);
  eval->add_option("--K-prime", sf.K_prime, "Defaults to K");
  eval->add_option("--M", sf.M);
  eval->add_option("--lambda", sf.lambda, "Explicit lambda for t0");
  eval->add_option("--out", sf.out);
  eval->callback([&] {
    action = [&] {
      const auto ctx = special::SpecialFnContext::for_dimension(sf.n);
      Json j = {{"function", sf.fn}, {"n", sf.n}};
      auto put = [&](const special::Interval& v) {
        const Json iv = io::to_json(v);
        j.update(iv);
        if (v.exact) j["value"] = io::number(v.lo);
      };
      if (sf.fn == "sigma") {
        put(special::Interval::point(special::surface_area(sf.n)));
      } else if (sf.fn == "gamma") {
        j["t"] = sf.t;
        put(special::grotzsch_gamma(ctx, sf.t));
      } else if (sf.fn == "tau") {
        j["s"] = sf.s;
        put(special::tau_from_gamma(ctx, sf.s));
      } else if (sf.fn == "phi") {
        j["A"] = sf.A;
        j["r"] = sf.r;
        put(special::distortion_phi(ctx, sf.A, sf.r));
      } else if (sf.fn == "rho") {
        j["r"] = sf.r;
        j["R"] = sf.R;
        put(special::Interval::point(special::ring_modulus_rho(sf.n, sf.r, sf.R)));
      } else if (sf.fn == "t0") {
        j["K"] = sf.K;
        if (sf.lambda) {
          j["lambda"] = *sf.lambda;
          put(special::Interval::point(special::t0_from_A(sf.n, sf.K * sf.K, *sf.lambda)));
        } else {
          const auto v = special::t0_constant(ctx, sf.K);
          put(special::Interval::point(v.value));
          j["value_lambda4"] = v.value_lambda4;
        }
      } else if (sf.fn == "qsbound") {
        const auto b = special::qs_bound_evaluator(ctx, sf.A);
        j["A"] = sf.A;
        j["t0"] = b.t0;
        j["A_t0"] = io::to_json(b.A_t0);
        j["B_t0"] = io::to_json(b.B_t0);
        j["ratio"] = io::to_json(b.ratio);
        j["ratio_bound"] = io::number(b.ratio_bound);
        j["holds"] = b.holds;
      } else {
        const double kp = sf.K_prime > 0 ? sf.K_prime : sf.K;
        const auto p = special::radius_threshold(ctx, sf.K, kp, sf.M);
        j.update(Json{{"K", p.K},
                      {"K_prime", p.K_prime},
                      {"A", p.A},
                      {"t0", p.t0},
                      {"log_R", io::number(p.log_R)},
                      {"R", io::number(p.R)},
                      {"c", p.c},
                      {"log_R_closed", io::number(p.log_R_closed)},
                      {"slack_first", p.slack_first},
                      {"slack_second", p.slack_second}});
      }
      emit(sf.out, out, dump(j));
    };
  });

  // dini
  struct {
    std::string in, out;
    double p = 2;
    bool log_weighted = false;
    double t_min = 0, t_max = 1;
  } dn;
  auto* dini_cmd = app.add_subcommand("dini", "Dini integral of a sampled scale profile");
  dini_cmd->add_option("--in", dn.in, "CSV with columns t,value")->required();
  dini_cmd->add_option("--p", dn.p);
  dini_cmd->add_flag("--log-weighted", dn.log_weighted);
  dini_cmd->add_option("--t-min", dn.t_min);
  dini_cmd->add_option("--t-max", dn.t_max);
  dini_cmd->add_option("--out", dn.out);
  dini_cmd->callback([&] {
    action = [&] {
      std::ifstream in(dn.in);
      if (!in) throw Error("cannot open " + dn.in);
      const auto prof = io::read_scale_profile_csv(in);
      dini::DiniOptions o;
      o.p = dn.p;
      o.log_weighted = dn.log_weighted;
      o.t_min = dn.t_min;
      o.t_max = dn.t_max;
      const auto rep = dini::dini_integral(prof, o);
      Json j = io::to_json(rep);
      Json seg = Json::array();
      for (double v : rep.segment_values) seg.push_back(io::number(v));
      j["segment_values"] = seg;
      emit(dn.out, out, dump(j));
    };
  });

  // experiment
  struct {
    std::string name, config, out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    bool no_header = false;
  } ex;
  auto* exp = app.add_subcommand("experiment", "Run a named experiment");
  exp->add_option("name", ex.name)->required()->check(CLI::IsMember(experiments::experiment_names()));
  exp->add_option("--config", ex.config, "qsphere-config-v1 JSON file");
  exp->add_option("--seed", ex.seed);
  exp->add_option("--set", ex.sets, "Parameter override key=json (repeatable)");
  exp->add_flag("--no-header", ex.no_header, "Omit the runtime header");
  exp->add_option("--out", ex.out);
  exp->callback([&] {
    action = [&] {
      Json params = Json::object();
      std::uint64_t seed = 1;
      if (!ex.config.empty()) {
        const Json cfg = read_json_file(ex.config);
        if (cfg.value("schema", "") != "qsphere-config-v1") throw Error("config schema must be qsphere-config-v1");
        if (cfg.contains("experiment") && cfg.at("experiment") != ex.name)
          throw Error("config is for experiment " + cfg.at("experiment").dump());
        params = cfg.value("params", Json::object());
        seed = cfg.value("seed", seed);
      }
      for (const auto& kv : ex.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        try {
          params[key] = Json::parse(value);
        } catch (const nlohmann::json::exception&) {
          params[key] = value;  // bare strings
        }
      }
      if (ex.seed) seed = *ex.seed;
      const auto rep = experiments::run_named(ex.name, params, seed);
      emit(ex.out, out, dump(rep.to_json(!ex.no_header)));
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (action) action();
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Error& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qsphere::cli
