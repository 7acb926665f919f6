#include "qsphere/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsphere::special {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mu_unchecked(double r, double rp) {
  // K(k) = π / (2 agm(1, k')), hence K(r')/K(r) = agm(1, r') / agm(1, r).
  return 0.5 * kPi * agm(1.0, rp) / agm(1.0, r);
}

// γ_2 from t - 1 (kept separately so that t close to 1 loses no digits).
double gamma2_from_gap(double gap) {
  const double t = 1.0 + gap;
  const double rp = std::sqrt(gap * (gap + 2.0)) / t;
  return 2.0 * kPi / mu_unchecked(1.0 / t, rp);
}

// Root of the increasing function g on [lo, hi] by bisection to full precision.
template <class G>
double bisect(G g, double lo, double hi) {
  for (int i = 0; i < 400 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection variable: u = log(t - 1) over this range covers every t the
// double format distinguishes from 1 up to about e^300.
constexpr double kGapLogLo = -700.0;
constexpr double kGapLogHi = 300.0;

double inverse_gamma2_gap_log(double value) {
  if (!(value > 0) || !std::isfinite(value))
    throw Error("cannot invert the Grötzsch modulus at a non-positive value");
  const double top = gamma2_from_gap(std::exp(kGapLogLo));
  const double bottom = gamma2_from_gap(std::exp(kGapLogHi));
  if (value > top || value < bottom)
    throw Error("Grötzsch inversion bracket failure: value " + std::to_string(value) +
                " outside [" + std::to_string(bottom) + ", " + std::to_string(top) + "]");
  // γ_2 decreases in t, so γ_2 - value decreases in u.
  return bisect([&](double u) { return value - gamma2_from_gap(std::exp(u)); }, kGapLogLo,
                kGapLogHi);
}

void require_unit_interval(double r) {
  if (!(r > 0 && r < 1)) throw Error("r must lie in (0, 1)");
}

}  // namespace

SpecialFnContext SpecialFnContext::for_dimension(int n) {
  SpecialFnContext c{n, n == 2 ? LambdaMode::exact_2d : LambdaMode::interval};
  c.validate();
  return c;
}

void SpecialFnContext::validate() const {
  if (n < 2) throw Error("dimension must be at least 2");
  if (n == 2 && lambda_mode != LambdaMode::exact_2d)
    throw Error("the planar context requires the exact Grötzsch constant");
  if (n > 2 && lambda_mode == LambdaMode::exact_2d)
    throw Error("exact mode is only available in the plane");
}

double SpecialFnContext::lambda_lower() const { return 4.0; }

double SpecialFnContext::lambda_upper() const {
  return n == 2 ? 4.0 : 2.0 * std::exp(static_cast<double>(n - 1));
}

double surface_area(int n) {
  if (n < 2) throw Error("dimension must be at least 2");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double agm(double a, double b) {
  if (!(a >= 0 && b >= 0)) throw Error("AGM needs non-negative arguments");
  for (int i = 0; i < 100; ++i) {
    if (std::abs(a - b) < 1e-15 * std::max(a, b)) break;
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

double ring_mu(double r, double rp) {
  require_unit_interval(r);
  if (rp < 0) rp = std::sqrt((1 - r) * (1 + r));
  return mu_unchecked(r, rp);
}

double grotzsch_gamma_2d(double t) {
  if (!(t > 1)) throw Error("outside Grötzsch domain: t must exceed 1");
  if (!std::isfinite(t)) return 0.0;
  return gamma2_from_gap(t - 1.0);
}

Interval gamma_bounds(const SpecialFnContext& ctx, double t) {
  ctx.validate();
  if (!(t > 1)) throw Error("outside Grötzsch domain: log t must be positive");
  const double sigma = surface_area(ctx.n);
  const double e = ctx.n - 1;
  const double hi = sigma / std::pow(std::log(t), e);  // may be +inf as t -> 1
  const double lo = sigma / std::pow(std::log(ctx.lambda_upper() * t), e);
  return {lo, hi, false};
}

Interval grotzsch_gamma(const SpecialFnContext& ctx, double t) {
  ctx.validate();
  if (ctx.n == 2) return Interval::point(grotzsch_gamma_2d(t));
  return gamma_bounds(ctx, t);
}

double grotzsch_gamma_2d_inverse(double value) {
  return 1.0 + std::exp(inverse_gamma2_gap_log(value));
}

Interval tau_from_gamma(const SpecialFnContext& ctx, double s) {
  if (!(s > 0)) throw Error("tau needs s > 0");
  const Interval g = grotzsch_gamma(ctx, std::sqrt(s + 1));
  const double f = std::pow(2.0, 1 - ctx.n);
  return {g.lo * f, g.hi * f, g.exact};
}

Interval distortion_phi(const SpecialFnContext& ctx, double A, double r) {
  ctx.validate();
  require_unit_interval(r);
  if (!(A > 0)) throw Error("distortion parameter A must be positive");
  if (ctx.n == 2) {
    const double y = A * gamma2_from_gap((1 - r) / r);
    return Interval::point(1.0 / (1.0 + std::exp(inverse_gamma2_gap_log(y))));
  }
  // γ lies between the decreasing bounds lo(t) <= γ(t) <= hi(t), so its
  // inverse lies between their inverses.
  const double sigma = surface_area(ctx.n);
  const double e = 1.0 / (ctx.n - 1);
  const Interval g = gamma_bounds(ctx, 1.0 / r);
  const double y_lo = A * g.lo, y_hi = A * g.hi;
  const double t_min = std::max(1.0, std::exp(std::pow(sigma / y_hi, e)) / ctx.lambda_upper());
  const double t_max = std::exp(std::pow(sigma / y_lo, e));
  return {1.0 / t_max, std::min(1.0, 1.0 / t_min), false};
}

double ring_modulus_rho(int n, double r, double R) {
  if (!(r > 0) || !(r < R)) throw Error("ring modulus needs 0 < r < R");
  return surface_area(n) * std::pow(std::log(R / r), 1 - n);
}

double t0_from_A(int n, double A, double lambda) {
  const double alpha = std::pow(A, 1.0 / (1 - n));
  const double beta = std::pow(A, 1.0 / (n - 1));
  return std::pow(std::pow(lambda, 2 * (alpha - 1)) * (A - 1) / A, beta);
}

T0Value t0_constant(const SpecialFnContext& ctx, double K) {
  ctx.validate();
  if (!(K > 1 && K <= 4.0 / 3.0)) throw Error("t0 needs 1 < K <= 4/3");
  const double A = K * K;
  return {t0_from_A(ctx.n, A, ctx.lambda_upper()), t0_from_A(ctx.n, A, 4.0)};
}

QsBound qs_bound_evaluator(const SpecialFnContext& ctx, double A) {
  ctx.validate();
  if (!(A > 1 && A <= 16.0 / 9.0)) throw Error("distortion bound needs 1 < A <= 16/9");
  QsBound q;
  q.t0 = t0_from_A(ctx.n, A, ctx.lambda_upper());
  const Interval pa = distortion_phi(ctx, A, std::sqrt(q.t0));
  if (pa.hi >= 1) throw Error("A too large for t0");
  auto a_of = [](double p) { return p * p / (1 - p * p); };
  q.A_t0 = {a_of(pa.lo), a_of(pa.hi), pa.exact};
  const Interval pb = distortion_phi(ctx, 1.0 / A, std::sqrt(q.t0 / (1 + q.t0)));
  q.B_t0 = {pb.lo * pb.lo, pb.hi * pb.hi, pb.exact};
  if (!(q.B_t0.lo > 0)) throw Error("distortion bound denominator vanishes");
  q.ratio = {q.A_t0.lo / q.B_t0.hi, q.A_t0.hi / q.B_t0.lo, pa.exact && pb.exact};
  q.ratio_bound = std::exp(72 * (A - 1) * std::log(1 / (A - 1)));
  q.holds = q.ratio.hi <= q.ratio_bound;
  return q;
}

HolderEnvelope holder_envelope(int n, double K_prime, double M) {
  if (n < 2) throw Error("dimension must be at least 2");
  if (!(K_prime >= 1)) throw Error("K' must be at least 1");
  return {std::pow(K_prime, 1.0 / (1 - n)), std::pow(K_prime, 1.0 / (n - 1)), M};
}

double holder_constant_needed(const HolderEnvelope& env, const std::function<Point(const Point&)>& f,
                              const std::vector<Point>& samples) {
  double m = 1.0;
  for (const auto& z : samples) {
    const double r = z.norm();
    if (r == 0) continue;
    const double a = std::pow(r, env.alpha_prime), b = std::pow(r, env.beta_prime);
    const double v = f(z).norm();
    m = std::max(m, v / std::max(a, b));
    if (v > 0)
      m = std::max(m, std::min(a, b) / v);
    else
      m = kInf;
  }
  return m;
}

namespace {

struct Absorption {
  double first = 0.0;   // residual of the (log R)^(n-1) inequality, root form
  double second = 0.0;  // residual of the Hölder inequality
};

Absorption absorption(const SpecialFnContext& ctx, double K, double K_prime, double M,
                      double log_R) {
  const int n = ctx.n;
  const double lambda = ctx.lambda_upper();
  const double t0 = t0_constant(ctx, K).value;
  const double ap = std::pow(K_prime, 1.0 / (1 - n));
  const double bp = std::pow(K_prime, 1.0 / (n - 1));
  const double w = std::pow(K_prime / (K * (K - 1)), 1.0 / (n - 1));
  Absorption a;
  a.first = log_R - w * std::log(lambda / std::sqrt(t0));
  a.second = ap * log_R - std::log(M) -
             w * (std::log(lambda) + 0.5 * (std::log(M) - bp * std::log(t0)));
  return a;
}

void check_threshold_inputs(double K, double K_prime) {
  if (!(K > 1 && K <= 4.0 / 3.0 && K <= K_prime)) throw Error("threshold needs 1 < K <= min(4/3, K')");
}

// Solves x log x = L for x >= 1.
double solve_xlogx(double L) {
  if (L <= 0) return 1.0;
  double hi = 2.0;
  while (hi * std::log(hi) < L) hi *= 2;
  return bisect([&](double x) { return x * std::log(x) - L; }, 1.0, hi);
}

}  // namespace

double minimal_log_R(const SpecialFnContext& ctx, double K, double K_prime, double M) {
  ctx.validate();
  check_threshold_inputs(K, K_prime);
  if (!(M >= 1)) throw Error("Hölder constant M must be at least 1");
  auto worst = [&](double L) {
    const auto a = absorption(ctx, K, K_prime, M, L);
    return std::min(a.first, a.second);
  };
  double hi = 1.0;
  while (worst(hi) < 0) {
    hi *= 2;
    if (!std::isfinite(hi)) throw Error("no finite radius threshold");
  }
  if (worst(0.0) >= 0) return 0.0;
  return bisect(worst, 0.0, hi);
}

double calibrate_c(const SpecialFnContext& ctx, double K_prime, double M) {
  double sup = 0.0;
  for (int k = 1; k <= 33; ++k) {
    const double K = 1.0 + 0.01 * k;
    const double L = minimal_log_R(ctx, K, std::max(K, K_prime), M);
    sup = std::max(sup, (K - 1) * solve_xlogx(L));
  }
  return 1.05 * sup;
}

ThresholdParams radius_threshold(const SpecialFnContext& ctx, double K, double K_prime, double M) {
  ctx.validate();
  check_threshold_inputs(K, K_prime);
  const int n = ctx.n;
  ThresholdParams p;
  p.K = K;
  p.K_prime = K_prime;
  p.A = K * K;
  p.alpha = std::pow(K, 1.0 / (1 - n));
  p.beta = std::pow(K, 1.0 / (n - 1));
  const auto env = holder_envelope(n, K_prime, M);
  p.alpha_prime = env.alpha_prime;
  p.beta_prime = env.beta_prime;
  p.holder_M = M;
  p.t0 = t0_constant(ctx, K).value;
  p.log_R = minimal_log_R(ctx, K, K_prime, M);
  p.R = std::exp(p.log_R);
  const auto a = absorption(ctx, K, K_prime, M, p.log_R);
  p.slack_first = a.first;
  p.slack_second = a.second;
  p.c = calibrate_c(ctx, K_prime, M);
  const double x = p.c / (K - 1);
  p.log_R_closed = x * std::log(x);
  return p;
}

}  // namespace qsphere::special
