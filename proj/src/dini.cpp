#include "qsphere/dini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsphere::dini {

TailDecision judge_tail(double prev, double last, double total, double tol) {
  if (last == 0 && prev == 0) return {Verdict::finite, 0.0};
  const double inf = std::numeric_limits<double>::infinity();
  const double q = prev > 0 ? last / prev : inf;
  if (q >= 0.999) return {Verdict::divergent, inf};
  const double tail = last * q / (1 - q);
  const double rel = total > 0 ? tail / total : 0.0;
  return {rel <= tol ? Verdict::finite : Verdict::inconclusive, rel};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kDecade = std::log(10.0);

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

template <class F>
double trapezoid(F f, double a, double b, int nodes) {
  if (!(b > a)) return 0.0;
  nodes = std::max(nodes, 2);
  const double step = (b - a) / (nodes - 1);
  std::vector<double> v(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) v[static_cast<std::size_t>(k)] = f(k + 1 == nodes ? b : a + k * step);
  return step * (pairwise_sum(v.data(), v.size()) - 0.5 * (v.front() + v.back()));
}

double weight(double x, double p, bool log_weighted) {
  if (!(x >= 0) || !std::isfinite(x)) throw Error("profile values must be finite and non-negative");
  if (x == 0) return 0.0;
  if (!log_weighted) return std::pow(x, p);
  // x log(1/x) is zero at x = 1 and negative beyond.
  if (x > 1) throw Error("log weight undefined: profile value exceeds 1");
  return std::pow(x * std::log(1 / x), p);
}

// Interpolates a measured profile linearly in u = log(1/t).
struct UInterp {
  std::vector<double> u, v;  // u ascending

  explicit UInterp(const ScaleProfile& g) {
    for (std::size_t i = g.t.size(); i-- > 0;) {
      u.push_back(std::log(1 / g.t[i]));
      v.push_back(g.value[i]);
    }
  }
  double operator()(double x) const {
    if (x <= u.front()) return v.front();
    if (x >= u.back()) return v.back();
    const auto it = std::upper_bound(u.begin(), u.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - u.begin());
    const double w = (x - u[j - 1]) / (u[j] - u[j - 1]);
    return v[j - 1] + w * (v[j] - v[j - 1]);
  }
};

DiniReport analytic_to_zero(const ScaleProfile& g, const DiniOptions& opts, DiniReport rep) {
  auto h = [&](double u) { return weight(g.of_u(u), opts.p, opts.log_weighted); };
  const double u0 = std::log(1 / opts.t_max);
  double total = 0.0, prev = -1.0;
  int stagnant = 0;
  for (int k = 0; k <= opts.max_doublings; ++k) {
    const double a = k == 0 ? u0 : u0 + kDecade * std::ldexp(1.0, k - 1);
    const double b = u0 + kDecade * std::ldexp(1.0, k);
    const double s = trapezoid(h, a, b, opts.nodes);
    total += s;
    rep.segment_values.push_back(s);
    rep.lower_cutoff = std::exp(-b);
    rep.value = total;
    if (k >= 2) {
      const auto d = judge_tail(prev, s, total, opts.tolerance);
      rep.tail_estimate = d.tail;
      if (d.verdict == Verdict::finite) {
        rep.verdict = Verdict::finite;
        return rep;
      }
      stagnant = d.verdict == Verdict::divergent ? stagnant + 1 : 0;
      if (stagnant >= opts.stagnation_doublings) {
        rep.verdict = Verdict::divergent;
        rep.infinite = true;
        rep.value = kInf;
        rep.diagnostic = "segment contributions stopped decaying";
        return rep;
      }
    }
    prev = s;
  }
  rep.verdict = Verdict::inconclusive;
  rep.diagnostic = "no decision within the doubling cap";
  return rep;
}

}  // namespace

ScaleProfile ScaleProfile::measured(std::vector<double> t, std::vector<double> value) {
  ScaleProfile p;
  p.t = std::move(t);
  p.value = std::move(value);
  p.validate();
  return p;
}

ScaleProfile ScaleProfile::analytic(std::function<double(double)> of_u, double t_min, double t_max,
                                    std::size_t count) {
  if (!(t_min > 0 && t_min < t_max && t_max <= 1)) throw Error("analytic profile needs 0 < t_min < t_max <= 1");
  ScaleProfile p;
  p.source = "analytic";
  p.of_u = std::move(of_u);
  count = std::max<std::size_t>(count, 2);
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    p.t.push_back(t);
    p.value.push_back(p.of_u(std::log(1 / t)));
  }
  p.t.back() = t_max;
  p.validate();
  return p;
}

void ScaleProfile::validate() const {
  if (t.size() != value.size()) throw Error("profile t and value lists differ in length");
  if (t.empty() && !of_u) throw Error("empty profile");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0 && t[i] <= 1)) throw Error("profile scales must lie in (0, 1]");
    if (i > 0 && !(t[i] > t[i - 1])) throw Error("profile scales must be strictly increasing");
    if (!std::isfinite(value[i]) || value[i] < 0)
      throw Error("profile values must be finite and non-negative");
  }
}

double ScaleProfile::decades() const {
  if (t.size() < 2) return 0.0;
  return std::log10(t.back() / t.front());
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string yes_no(Verdict v) {
  switch (v) {
    case Verdict::finite: return "yes";
    case Verdict::divergent: return "no";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DiniReport dini_integral(const ScaleProfile& g, const DiniOptions& opts) {
  g.validate();
  if (!(opts.t_max > 0 && opts.t_max <= 1)) throw Error("t_max must lie in (0, 1]");
  if (!(opts.t_min >= 0 && opts.t_min < opts.t_max)) throw Error("t_min must lie in [0, t_max)");
  if (!(opts.p > 0)) throw Error("exponent p must be positive");
  DiniReport rep;
  rep.p = opts.p;
  rep.log_weighted = opts.log_weighted;
  rep.t_min = opts.t_min;
  rep.t_max = opts.t_max;

  if (g.is_analytic()) {
    if (opts.t_min == 0) return analytic_to_zero(g, opts, rep);
    auto h = [&](double u) { return weight(g.of_u(u), opts.p, opts.log_weighted); };
    rep.value = trapezoid(h, std::log(1 / opts.t_max), std::log(1 / opts.t_min), opts.nodes);
    rep.lower_cutoff = opts.t_min;
    rep.verdict = Verdict::finite;
    rep.diagnostic = "finite range";
    return rep;
  }

  const double hi_t = std::min(opts.t_max, g.t.back());
  const double lo_t = std::max(opts.t_min, g.t.front());
  if (!(hi_t > lo_t)) throw Error("integration range does not meet the sampled scales");
  const UInterp interp(g);
  auto h = [&](double u) { return weight(interp(u), opts.p, opts.log_weighted); };
  const double u_a = std::log(1 / hi_t), u_b = std::log(1 / lo_t);
  rep.lower_cutoff = lo_t;
  double total = 0.0;
  std::vector<double> full;
  for (double a = u_a; a < u_b; a += kDecade) {
    const double b = std::min(u_b, a + kDecade);
    const double s = trapezoid(h, a, b, opts.nodes);
    total += s;
    rep.segment_values.push_back(s);
    if (b - a >= kDecade * (1 - 1e-12)) full.push_back(s);
  }
  rep.value = total;
  if (std::log10(hi_t / lo_t) < 2 - 1e-9 || full.size() < 2) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostic = "sampled range spans fewer than 2 decades";
    return rep;
  }
  const auto d = judge_tail(full[full.size() - 2], full.back(), total, opts.tolerance);
  rep.tail_estimate = d.tail;
  rep.verdict = d.verdict;
  if (d.verdict == Verdict::divergent) {
    rep.infinite = true;
    rep.diagnostic = "decade contributions do not decay";
  } else if (d.verdict == Verdict::inconclusive) {
    rep.diagnostic = "extrapolated tail exceeds tolerance";
  }
  return rep;
}

MajorantModel build_majorant(const ScaleProfile& g, double b_cap) {
  g.validate();
  if (g.t.empty()) throw Error("majorant needs sampled values");
  MajorantModel m;
  m.t = g.t;
  const bool all_zero = std::all_of(g.value.begin(), g.value.end(), [](double v) { return v == 0; });
  if (all_zero) {
    m.zero_profile = true;
    m.value = g.t;
    return m;
  }
  m.value.resize(g.t.size());
  double running = 0.0, b = 1.0;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    running = std::max(running, g.value[i]);
    m.value[i] = running;
    if (running > 0) b = std::max(b, g.value[i] > 0 ? running / g.value[i] : kInf);
  }
  m.b = b;
  if (!(b <= b_cap)) {
    m.b = kInf;
    m.b_infinite = true;
  }
  return m;
}

namespace {

struct Piece {
  bool loglog;
  double slope;  // d log M / d log t, or dM/dt
};

Piece piece(const MajorantModel& m, std::size_t j) {
  const double t0 = m.t[j], t1 = m.t[j + 1], v0 = m.value[j], v1 = m.value[j + 1];
  if (v0 > 0 && v1 > 0) return {true, std::log(v1 / v0) / std::log(t1 / t0)};
  return {false, (v1 - v0) / (t1 - t0)};
}

}  // namespace

double MajorantModel::operator()(double x) const {
  if (!(x > 0)) throw Error("majorant evaluated at non-positive t");
  if (t.size() == 1) return value.front();
  if (x <= t.front()) {
    const Piece p = piece(*this, 0);
    if (p.loglog && p.slope > 0) return value.front() * std::pow(x / t.front(), p.slope);
    return value.front();
  }
  if (x >= t.back()) return value.back();
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  const Piece p = piece(*this, j);
  if (p.loglog) return value[j] * std::pow(x / t[j], p.slope);
  return value[j] + p.slope * (x - t[j]);
}

double MajorantModel::derivative(double x) const {
  if (t.size() == 1 || x >= t.back()) return 0.0;
  if (x <= t.front()) {
    const Piece p = piece(*this, 0);
    return p.loglog && p.slope > 0 ? (*this)(x) * p.slope / x : 0.0;
  }
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  const Piece p = piece(*this, j);
  return p.loglog ? (*this)(x) * p.slope / x : p.slope;
}

ScaleProfile MajorantModel::as_profile() const { return ScaleProfile::measured(t, value); }

ChangeOfVariables::ChangeOfVariables(std::function<double(double)> M, std::function<double(double)> dM,
                                     double c)
    : M_(std::move(M)), dM_(std::move(dM)), c_(c) {
  if (!(c > 1)) throw Error("change of variables needs c > 1");
}

ChangeOfVariables ChangeOfVariables::from_majorant(const MajorantModel& m, double c) {
  return ChangeOfVariables([m](double t) { return m(t); }, [m](double t) { return m.derivative(t); },
                           c);
}

double ChangeOfVariables::M(double t) const {
  const double v = M_(t);
  if (!(v < c_)) throw Error("majorant reaches c; the change of variables needs M < c");
  return v;
}

double ChangeOfVariables::log_phi(double t) const {
  if (!(t > 0)) throw Error("phi evaluated at non-positive t");
  const double psi = M(t) / c_;
  if (psi <= 0) return -kInf;
  return std::log(t) + std::log(psi) / psi;
}

double ChangeOfVariables::phi(double t) const { return std::exp(log_phi(t)); }

double ChangeOfVariables::log_derivative(double t) const {
  const double psi = M(t) / c_;
  if (psi <= 0) throw Error("phi' / phi undefined where the majorant vanishes");
  const double dpsi = dM_(t) / c_;
  return 1 / t + dpsi / (psi * psi) * (1 + std::log(1 / psi));
}

double ChangeOfVariables::log_derivative_fd(double t, double h) const {
  return (log_phi(t * (1 + h)) - log_phi(t * (1 - h))) / (2 * t * h);
}

TwoTermSplit two_term_decomposition(const ChangeOfVariables& cov, double t_min, double t_max,
                                    int nodes) {
  if (!(t_min > 0 && t_min < t_max)) throw Error("decomposition needs 0 < t_min < t_max");
  const double c = cov.c();
  auto lead = [&](double t) {
    const double m = cov.M(t);
    const double w = m * std::log(1 / m);
    return w * w;
  };
  const double a = std::log(1 / t_max), b = std::log(1 / t_min);
  TwoTermSplit s;
  s.total = trapezoid(
      [&](double u) {
        const double t = std::exp(-u);
        return lead(t) * cov.log_derivative(t) * t;
      },
      a, b, nodes);
  s.m_term = trapezoid([&](double u) { return lead(std::exp(-u)); }, a, b, nodes);
  s.psi_term = trapezoid(
      [&](double u) {
        const double t = std::exp(-u);
        const double psi = cov.M(t) / c;
        const double dpsi = (cov.log_derivative(t) - 1 / t) * psi * psi / (1 + std::log(1 / psi));
        const double l = std::log(1 / (c * psi));
        return c * c * l * l * (1 + std::log(1 / psi)) * dpsi * t;
      },
      a, b, nodes);
  return s;
}

RectifiabilityVerdict classify_rectifiability(const ScaleProfile& k_profile,
                                              const std::optional<ScaleProfile>& h_profile) {
  RectifiabilityVerdict out;
  k_profile.validate();
  out.majorant = build_majorant(k_profile);
  const double t_top = k_profile.t.back();

  auto guarded = [&](auto&& run) -> DiniReport {
    try {
      return run();
    } catch (const Error& e) {
      DiniReport r;
      r.verdict = Verdict::inconclusive;
      r.diagnostic = e.what();
      return r;
    }
  };

  out.k_condition = guarded([&] {
    DiniOptions o;
    o.p = 2;
    o.log_weighted = true;
    o.t_max = t_top;
    if (out.majorant.zero_profile) {
      ScaleProfile m;
      m.source = "analytic";
      m.of_u = [](double u) { return std::exp(-u); };
      return dini_integral(m, o);
    }
    if (k_profile.is_analytic() && out.majorant.b == 1.0) return dini_integral(k_profile, o);
    if (out.majorant.b_infinite) throw Error("profile admits no finite majorant factor");
    return dini_integral(out.majorant.as_profile(), o);
  });
  out.thm_asymptotic = out.k_condition.verdict;

  if (h_profile) {
    out.h_condition = guarded([&] {
      DiniOptions o;
      o.p = 2;
      o.t_max = h_profile->t.empty() ? 1.0 : h_profile->t.back();
      return dini_integral(*h_profile, o);
    });
    out.thm_weak_qs = out.h_condition->verdict;
  }
  if (!k_profile.is_analytic() && k_profile.decades() < 2) {
    out.thm_asymptotic = Verdict::inconclusive;
    out.diagnostic = "profile spans fewer than 2 decades";
  }
  return out;
}

}  // namespace qsphere::dini
