#pragma once

#include "qsphere/core.hpp"

#include <functional>
#include <vector>

namespace qsphere::special {

enum class LambdaMode { exact_2d, interval };

struct SpecialFnContext {
  int n = 2;
  LambdaMode lambda_mode = LambdaMode::exact_2d;

  static SpecialFnContext for_dimension(int n);
  void validate() const;
  /// Lower and upper Grötzsch constants: 4 and 4 in the plane, 4 and 2e^(n-1)
  /// otherwise.
  [[nodiscard]] double lambda_lower() const;
  [[nodiscard]] double lambda_upper() const;
};

/// Closed interval; `exact` marks a point value (lo == hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool exact = false;

  static Interval point(double v) { return {v, v, true}; }
  [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
};

/// σ_{n-1} = 2π^(n/2) / Γ(n/2).
double surface_area(int n);

/// Arithmetic-geometric mean, iterated until successive terms agree to 1e-15.
double agm(double a, double b);

/// μ(r) = (π/2) K(r') / K(r), r' = sqrt(1 - r^2), for 0 < r < 1. `rp` may pass
/// r' directly when it is known more accurately than sqrt(1 - r^2).
double ring_mu(double r, double rp = -1.0);

/// Planar Grötzsch modulus γ_2(t) = 2π / μ(1/t), t > 1.
double grotzsch_gamma_2d(double t);

/// [σ/(log λ_up t)^(n-1), σ/(log t)^(n-1)].
Interval gamma_bounds(const SpecialFnContext& ctx, double t);

/// γ_n(t): exact in the plane, the bound interval otherwise.
Interval grotzsch_gamma(const SpecialFnContext& ctx, double t);

/// Inverse of γ_2 on (1, ∞) by bisection.
double grotzsch_gamma_2d_inverse(double value);

/// τ_n(s) = 2^(1-n) γ_n(sqrt(s + 1)), s > 0.
Interval tau_from_gamma(const SpecialFnContext& ctx, double s);

/// φ_{A,n}(r) = 1 / γ_n^{-1}(A γ_n(1/r)), 0 < r < 1.
Interval distortion_phi(const SpecialFnContext& ctx, double A, double r);

/// ρ_n(r, R) = σ_{n-1} (log(R/r))^(1-n), 0 < r < R.
double ring_modulus_rho(int n, double r, double R);

/// t0 for a generic distortion A with explicit λ:
/// (λ^(2(α-1)) (A-1)/A)^β, α = A^(1/(1-n)), β = A^(1/(n-1)).
double t0_from_A(int n, double A, double lambda);

struct T0Value {
  double value = 0.0;          // λ from the context (λ_up in interval mode)
  double value_lambda4 = 0.0;  // the λ = 4 variant
};

/// t0 with A = K^2, for 1 < K <= 4/3.
T0Value t0_constant(const SpecialFnContext& ctx, double K);

struct QsBound {
  Interval A_t0;
  Interval B_t0;
  Interval ratio;  // A_t0 / B_t0
  double t0 = 0.0;
  double ratio_bound = 0.0;  // exp(72 (A-1) log(1/(A-1)))
  bool holds = false;        // ratio.hi <= ratio_bound
};

/// 𝒜(t0) = φ_A^2(√t0) / (1 - φ_A^2(√t0)) and ℬ(t0) = φ_{1/A}^2(√(t0/(1+t0)))
/// with t0 = t0_from_A(A), for 1 < A <= 16/9.
QsBound qs_bound_evaluator(const SpecialFnContext& ctx, double A);

struct HolderEnvelope {
  double alpha_prime = 1.0;  // K'^(1/(1-n))
  double beta_prime = 1.0;   // K'^(1/(n-1))
  double M = 10.0;
};

HolderEnvelope holder_envelope(int n, double K_prime, double M = 10.0);

/// Smallest M with M^{-1} min(|z|^α', |z|^β') <= |f(z)| <= M max(...) over
/// the given samples, for a map with f(0) = 0.
double holder_constant_needed(const HolderEnvelope& env, const std::function<Point(const Point&)>& f,
                              const std::vector<Point>& samples);

struct ThresholdParams {
  double K = 1.0;
  double K_prime = 1.0;
  double A = 1.0;
  double alpha = 1.0, beta = 1.0;
  double alpha_prime = 1.0, beta_prime = 1.0;
  double holder_M = 10.0;
  double t0 = 0.0;
  double log_R = 0.0;  // log of the minimal admissible R
  double R = 1.0;      // exp(log_R); +inf when it overflows
  double c = 0.0;      // calibrated constant of the closed form
  double log_R_closed = 0.0;  // (c/(K-1)) log(c/(K-1))
  double slack_first = 0.0;   // residuals of the two inequalities at log_R
  double slack_second = 0.0;
};

/// log of the minimal R satisfying both absorption inequalities, by bisection.
double minimal_log_R(const SpecialFnContext& ctx, double K, double K_prime, double M);

/// Smallest c with (c/(K-1))^(c/(K-1)) >= minimal R for every K on the grid
/// {1.01, ..., 1.33}, plus a 5% margin.
double calibrate_c(const SpecialFnContext& ctx, double K_prime, double M);

ThresholdParams radius_threshold(const SpecialFnContext& ctx, double K, double K_prime,
                                 double M = 10.0);

}  // namespace qsphere::special
