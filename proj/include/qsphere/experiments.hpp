#pragma once

#include "qsphere/dini.hpp"
#include "qsphere/generators.hpp"
#include "qsphere/io.hpp"
#include "qsphere/maps.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qsphere::experiments {

using io::Json;
using maps::MapSpec;

enum class Status { pass, fail, not_applicable, inconclusive };
std::string to_string(Status s);

struct ExperimentReport {
  std::string name;
  Json inputs = Json::object();
  Json measured = Json::object();
  Json bound = Json::object();
  Status status = Status::inconclusive;
  double margin = 0.0;
  std::string note;
  double runtime_seconds = 0.0;

  /// The runtime is left out when `with_header` is false, which makes the
  /// document a pure function of the inputs.
  [[nodiscard]] Json to_json(bool with_header = true) const;
};

// Values below this are indistinguishable from rounding in the distortion
// estimators and are reported as zero in scale profiles.
inline constexpr double kRoundingFloor = 1e-12;

struct LemmaOptions {
  std::size_t sphere_samples = 0;  // 0: 4096 (n=2) / 10000 (n=3)
  std::size_t line_samples = 0;    // 0: 4001 (n=2) / 121 per side (n=3)
  double line_extent = 1.5;        // L is sampled in |x| <= extent
  /// Closed-form weak quasisymmetry constant of the map near the closed
  /// unit ball; the sampled estimate is never used for the hypothesis.
  double closed_form_H = 1.0;
};

/// Containment B(f(0), 5/6) ⊂ f(B(0,1)) and θ_{f(L)}(f(0), 1/2) <= 20ε for
/// L = e1^⊥, under H <= 1 + ε, ε <= 1/20 and f(±e1) = ±e1.
ExperimentReport lemma_flat_check(const MapSpec& f, double epsilon, const LemmaOptions& opts = {});

/// Linear maps with A e1 = e1 and condition number <= 1 + ε_max, so that the
/// closed-form H = cond(A) meets the lemma's hypothesis.
struct NormalizedLinear {
  MapSpec map;
  double H = 1.0;  // σ_max / σ_min
};
std::vector<NormalizedLinear> normalized_linear_family(std::size_t count, double epsilon_max,
                                                       std::uint64_t seed);

/// Runs lemma_flat_check on normalized_linear_family.
ExperimentReport lemma_suite(std::size_t count, double epsilon_max, std::uint64_t seed);

struct FlatnessBoundOptions {
  std::size_t sphere_samples = 20000;
  std::size_t qs_triples = 20000;
  std::uint64_t seed = 1;
  /// Closed-form H~ on the balls B(z, 2t); measured when absent.
  std::optional<double> closed_form_H_tilde;
};

/// sup_z θ_{f(S)}(f(z), t) against 20 H~ + C t^β, β = 2α² - 1, α = 1/(1+H~),
/// with the smallest C reported as calibration output.
ExperimentReport flatness_vs_bound(const MapSpec& f, const PointSet& centers,
                                   const std::vector<double>& t_list,
                                   const FlatnessBoundOptions& opts = {});

struct DimensionOptions {
  std::size_t curve_samples = 1u << 15;
  std::vector<double> radii{0.4, 0.2, 0.1};
  std::size_t centers = 16;
  std::size_t qs_triples = 20000;
  std::uint64_t seed = 1;
};

/// Box dimension of f(S^1) against 1 + C (inf_r sup_z H~(B(z,r)))², C calibrated.
ExperimentReport dimension_bound_check(const MapSpec& f, const DimensionOptions& opts = {});
/// Box dimension of a given planar curve (e.g. a snowflake), for contrast.
ExperimentReport curve_dimension(const PointSet& curve, const std::string& label);

struct SweepOptions {
  std::size_t qs_triples = 200000;
  std::uint64_t seed = 1;
};

/// H~ / ((K-1) log(1/(K-1))) over the grid; family "radial" (a = 1/K) or
/// "linear" (diag(K, 1)).
ExperimentReport thm31_sweep(const std::string& family, const std::vector<double>& K_grid,
                             const SweepOptions& opts = {});

/// K <= H^(n-1) (1 + 5%) on every built-in map, over B(0, 2).
ExperimentReport kh_chain(std::size_t dilatation_samples = 100000, std::size_t triples = 200000,
                          std::uint64_t seed = 1);

struct PipelineOptions {
  std::vector<double> scales;  // empty: 10^(-k/4), k = 2..12
  std::size_t curve_samples = 1u << 17;
  std::size_t centers = 16;
  std::size_t dilatation_samples = 20000;
  std::size_t qs_triples = 20000;
  std::uint64_t seed = 1;
  int generations = 8;  // snowflake polyline used for the dimension
};

/// Dini conditions of the rectifiability theorems on measured profiles, the
/// θ-Dini integral, and the direct length measurement.
ExperimentReport rectifiability_pipeline(const MapSpec& f, const PipelineOptions& opts = {});
ExperimentReport rectifiability_pipeline(const gen::AngleSchedule& schedule,
                                         const PipelineOptions& opts = {});

/// Piecewise-constant θ(u) = θ_j on the u-range of generation j, where
/// generation j has segment length Π_{i<=j} p_i = e^{-u_j}.
std::function<double(double)> schedule_theta_of_u(const gen::AngleSchedule& schedule);

/// Length-convergence decision on the product formula: log-length
/// increments over doubling generation blocks up to 2^20.
struct LengthTrend {
  dini::Verdict verdict = dini::Verdict::inconclusive;
  std::vector<double> log_length_increments;
};
LengthTrend length_trend(const gen::AngleSchedule& schedule);

/// Runs an experiment by name with JSON parameters (CLI and config files).
ExperimentReport run_named(const std::string& name, const Json& params, std::uint64_t seed);
std::vector<std::string> experiment_names();

}  // namespace qsphere::experiments
