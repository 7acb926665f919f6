#pragma once

#include "qsphere/core.hpp"

#include <cstdint>
#include <random>

namespace qsphere {

/// Radical inverse of `index` in `base` (van der Corput); index >= 1 keeps the
/// value inside (0, 1).
double radical_inverse(std::uint64_t index, unsigned base);

/// Point k >= 1 of the Halton sequence in [0,1)^d, d <= 3.
Vec halton(std::uint64_t k, int d);

/// Engine for block `block` of a seeded stream. Work split into fixed-size
/// blocks stays reproducible whatever the thread count.
std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block);

/// Uniform point in the ball B(center, radius) by rejection.
Point uniform_in_ball(std::mt19937_64& rng, const Point& center, double radius);

/// Maps a unit-cube point to the ball (radius ∝ u^(1/n), uniform angles).
Point cube_to_ball(const Vec& u, const Point& center, double radius);
/// Maps a unit-cube point to the shell 1 - t < |x| < 1 + t, uniform in volume.
Point cube_to_annulus(const Vec& u, double t);

/// Deterministic low-discrepancy points on S^{n-1}: equally spaced in n = 2,
/// a Fibonacci lattice in n = 3. A non-zero seed applies a fixed random
/// rotation.
PointSet sphere_sampler(int n, std::size_t count, std::uint64_t seed = 0);

/// Halton points in A_t = {1 - t < |x| < 1 + t}; the seed shifts the
/// sequence (Cranley-Patterson rotation).
PointSet annulus_sampler(int n, double t, std::size_t count, std::uint64_t seed = 0);

}  // namespace qsphere
