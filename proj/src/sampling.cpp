#include "qsphere/sampling.hpp"

#include "qsphere/geometry.hpp"

#include <array>
#include <cmath>

namespace qsphere {

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

Vec halton(std::uint64_t k, int d) {
  static constexpr std::array<unsigned, 3> kBases{2, 3, 5};
  Vec u(d);
  for (int i = 0; i < d; ++i) u(i) = radical_inverse(k, kBases[static_cast<std::size_t>(i)]);
  return u;
}

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

Point uniform_in_ball(std::mt19937_64& rng, const Point& center, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto n = center.size();
  Point p(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) p(i) = u(rng);
  } while (p.squaredNorm() > 1.0);
  return center + radius * p;
}

namespace {

Point direction_from_cube(double a, double b, int n) {
  const double phi = 2 * kPi * a;
  if (n == 2) return make_point({std::cos(phi), std::sin(phi)});
  const double z = 1 - 2 * b;
  const double s = std::sqrt(std::max(0.0, 1 - z * z));
  return make_point({s * std::cos(phi), s * std::sin(phi), z});
}

// Rotation fixed by a seed; identity for seed 0.
Mat seeded_rotation(int n, std::uint64_t seed) {
  if (seed == 0) return Mat::Identity(n, n);
  auto rng = block_engine(seed, 0x5eed);
  std::normal_distribution<double> g;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace

Point cube_to_ball(const Vec& u, const Point& center, double radius) {
  const int n = static_cast<int>(center.size());
  const double rho = radius * std::pow(u(0), 1.0 / n);
  return center + rho * direction_from_cube(u(1), n == 3 ? u(2) : 0.0, n);
}

Point cube_to_annulus(const Vec& u, double t) {
  const int n = static_cast<int>(u.size());
  const double lo = std::pow(1 - t, n), hi = std::pow(1 + t, n);
  const double rho = std::pow(lo + u(0) * (hi - lo), 1.0 / n);
  return rho * direction_from_cube(u(1), n == 3 ? u(2) : 0.0, n);
}

PointSet sphere_sampler(int n, std::size_t count, std::uint64_t seed) {
  if (n < 2 || n > 3) throw Error("sphere dimension must be 2 or 3");
  if (count < 1) throw Error("count must be positive");
  const Mat rot = seeded_rotation(n, seed);
  PointSet out(n, {}, "sphere");
  out.points.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    Point p;
    if (n == 2) {
      const double a = 2 * kPi * static_cast<double>(k) / static_cast<double>(count);
      p = make_point({std::cos(a), std::sin(a)});
    } else {
      const double z = 1 - (2.0 * static_cast<double>(k) + 1) / static_cast<double>(count);
      const double s = std::sqrt(std::max(0.0, 1 - z * z));
      const double a = golden * static_cast<double>(k);
      p = make_point({s * std::cos(a), s * std::sin(a), z});
    }
    p = rot * p;
    out.points.push_back(p / p.norm());
  }
  return out;
}

PointSet annulus_sampler(int n, double t, std::size_t count, std::uint64_t seed) {
  if (n < 2 || n > 3) throw Error("annulus dimension must be 2 or 3");
  if (!(t > 0 && t < 1)) throw Error("annulus parameter t must lie in (0, 1)");
  Vec shift = Vec::Zero(n);
  if (seed != 0) {
    auto rng = block_engine(seed, 0xa22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) shift(i) = u(rng);
  }
  PointSet out(n, {}, "annulus");
  out.points.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    Vec u = halton(k, n) + shift;
    for (int i = 0; i < n; ++i) {
      u(i) -= std::floor(u(i));
      if (u(i) <= 0.0) u(i) = 0.5 / static_cast<double>(count + 1);
    }
    out.points.push_back(cube_to_annulus(u, t));
  }
  return out;
}

}  // namespace qsphere
