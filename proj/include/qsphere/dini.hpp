#pragma once

#include "qsphere/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qsphere::dini {

/// A non-negative function of the scale t ∈ (0, 1). Measured profiles are
/// sample lists (t ascending); analytic ones are given as functions of
/// u = log(1/t) so that very small scales are reachable without underflow.
struct ScaleProfile {
  std::vector<double> t;
  std::vector<double> value;
  std::string source = "measured";
  std::function<double(double)> of_u;  // analytic form, when present

  static ScaleProfile measured(std::vector<double> t, std::vector<double> value);
  /// Samples `of_u` at `count` log-spaced scales in [t_min, t_max] as well.
  static ScaleProfile analytic(std::function<double(double)> of_u, double t_min = 1e-12,
                               double t_max = 0.5, std::size_t count = 121);

  [[nodiscard]] bool is_analytic() const { return static_cast<bool>(of_u); }
  /// Throws unless t is strictly increasing in (0, 1] and values are finite
  /// and non-negative.
  void validate() const;
  /// Decades spanned by the samples.
  [[nodiscard]] double decades() const;
};

enum class Verdict { finite, divergent, inconclusive };
std::string to_string(Verdict v);

struct TailDecision {
  Verdict verdict = Verdict::inconclusive;
  double tail = 0.0;  // extrapolated remainder relative to `total`
};

/// Geometric-tail rule for consecutive block contributions: a ratio of at
/// least 0.999 counts as divergent, otherwise the remainder last q/(1-q) is
/// finite once it is within `tol` of the running total.
TailDecision judge_tail(double prev, double last, double total, double tol);

struct DiniOptions {
  double p = 2.0;
  bool log_weighted = false;
  /// Integration range in t. For analytic profiles t_min = 0 means the
  /// integral down to t = 0, decided by the extension test.
  double t_min = 0.0;
  double t_max = 1.0;
  int nodes = 10000;  // trapezoid nodes per segment
  double tolerance = 1e-3;
  int max_doublings = 64;
  int stagnation_doublings = 8;
};

struct DiniReport {
  double value = 0.0;
  bool infinite = false;
  double p = 2.0;
  bool log_weighted = false;
  double t_min = 0.0;
  double t_max = 1.0;
  double lower_cutoff = 0.0;   // smallest t actually integrated
  double tail_estimate = 0.0;  // estimated remaining mass relative to value
  Verdict verdict = Verdict::inconclusive;
  std::string diagnostic;
  std::vector<double> segment_values;  // contributions of the u-segments
};

/// ∫ h(g(t)) dt/t with h(x) = x^p, or (x log(1/x))^p when log weighted
/// (h(0) = 0), computed in u = log(1/t) by composite trapezoid sums.
///
/// Analytic profiles with t_min = 0: the u-range is extended by doubling
/// segments (the first spans one decade). The integral is finite once the
/// geometric tail estimate drops below the tolerance, divergent once the
/// segment contributions stop decaying for `stagnation_doublings` doublings.
///
/// Measured profiles (linear interpolation in u): the sampled range must span
/// two decades; per-decade contributions are extrapolated geometrically.
DiniReport dini_integral(const ScaleProfile& g, const DiniOptions& opts = {});

/// Monotone two-sided envelope M with g <= M <= b g at the samples,
/// piecewise log-linear in t between knots.
struct MajorantModel {
  std::vector<double> t;
  std::vector<double> value;
  double b = 1.0;               // +inf when no finite factor within the cap works
  bool zero_profile = false;    // g ≡ 0, M(t) = t
  bool b_infinite = false;

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double derivative(double t) const;
  /// M as a measured ScaleProfile on its knots.
  [[nodiscard]] ScaleProfile as_profile() const;
};

MajorantModel build_majorant(const ScaleProfile& g, double b_cap = 1e6);

/// φ(t) = t (M(t)/c)^(c/M(t)) and its logarithmic derivative
/// φ'/φ = 1/t + (ψ'/ψ²)(1 + log(1/ψ)), ψ = M/c.
class ChangeOfVariables {
 public:
  ChangeOfVariables(std::function<double(double)> M, std::function<double(double)> dM, double c);
  static ChangeOfVariables from_majorant(const MajorantModel& m, double c);

  [[nodiscard]] double log_phi(double t) const;
  [[nodiscard]] double phi(double t) const;
  /// φ'/φ from the closed-form identity.
  [[nodiscard]] double log_derivative(double t) const;
  [[nodiscard]] double derivative(double t) const { return phi(t) * log_derivative(t); }
  /// Central difference of log φ with relative step h.
  [[nodiscard]] double log_derivative_fd(double t, double h = 1e-6) const;
  [[nodiscard]] double c() const { return c_; }
  [[nodiscard]] double M(double t) const;

 private:
  std::function<double(double)> M_, dM_;
  double c_;
};

/// ∫ (M log 1/M)² φ'/φ dt over [t_min, t_max], together with the two terms of
/// its split: ∫ (M log 1/M)² dt/t and ∫ c² (log 1/(cψ))² (1 + log 1/ψ) ψ' dt.
struct TwoTermSplit {
  double total = 0.0;
  double m_term = 0.0;
  double psi_term = 0.0;
};
TwoTermSplit two_term_decomposition(const ChangeOfVariables& cov, double t_min, double t_max,
                                    int nodes = 200000);

struct RectifiabilityVerdict {
  DiniReport k_condition;                 // (K~ log 1/K~)^2 dt/t on the majorant
  std::optional<DiniReport> h_condition;  // H~^2 dt/t
  MajorantModel majorant;
  Verdict thm_asymptotic = Verdict::inconclusive;  // K-profile hypothesis
  Verdict thm_weak_qs = Verdict::inconclusive;     // H-profile hypothesis
  std::string diagnostic;
};

std::string yes_no(Verdict v);  // finite → yes, divergent → no

RectifiabilityVerdict classify_rectifiability(const ScaleProfile& k_profile,
                                              const std::optional<ScaleProfile>& h_profile);

}  // namespace qsphere::dini
