#pragma once

// Seeded generators and variate samplers with a fixed, platform-independent
// consumption order. std::*_distribution is avoided on purpose: its output is
// implementation-defined, and experiment CSVs must replay bit-identically.

#include <cstdint>
#include <random>

namespace stickperm {

using Generator = std::mt19937_64;

/// Counter-based seed derivation: the state for replicate `replicate` of grid
/// point `grid_index` depends only on the triple, never on scheduling.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t replicate) noexcept;

Generator make_generator(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t replicate);

/// Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
double uniform_open(Generator& gen) noexcept;

double standard_exponential(Generator& gen) noexcept;

/// Box-Muller, consumes exactly two uniforms per call.
double standard_normal(Generator& gen) noexcept;

/// Marsaglia-Tsang; shape < 1 handled by the U^(1/shape) boost.
double sample_gamma(Generator& gen, double shape);

/// Inversion for mean < 30, Hörmann's PTRS transformed rejection above.
std::uint64_t sample_poisson(Generator& gen, double mean);

/// Inversion when trials*min(p,1-p) < 10, Hörmann's BTRS otherwise.
std::uint64_t sample_binomial(Generator& gen, std::uint64_t trials, double p);

}  // namespace stickperm
