#include "stickperm/random.hpp"

#include <cmath>
#include <numbers>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

namespace stickperm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t binomial_inversion(Generator& gen, std::uint64_t trials, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::exp(static_cast<double>(trials) * std::log1p(-p));
  double u = uniform_open(gen);
  std::uint64_t k = 0;
  while (u > pmf && k < trials) {
    u -= pmf;
    pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
    ++k;
  }
  return k;
}

// Hörmann (1993), BTRS. Requires p <= 1/2 and trials * p >= 10.
std::uint64_t binomial_btrs(Generator& gen, std::uint64_t trials, double p) {
  const double n = static_cast<double>(trials);
  const double q = 1.0 - p;
  const double spq = std::sqrt(n * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double mode = std::floor((n + 1.0) * p);
  const double h = log_gamma(mode + 1.0) + log_gamma(n - mode + 1.0);
  for (;;) {
    const double u = uniform_open(gen) - 0.5;
    double v = uniform_open(gen);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > n) continue;
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - log_gamma(k + 1.0) - log_gamma(n - k + 1.0) + (k - mode) * lpq) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

// Hörmann (1993), PTRS. Requires mean >= 10.
std::uint64_t poisson_ptrs(Generator& gen, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform_open(gen) - 0.5;
    const double v = uniform_open(gen);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_gamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t replicate) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(grid_index + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(replicate + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

Generator make_generator(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t replicate) {
  return Generator{split_seed(master, grid_index, replicate)};
}

double uniform_open(Generator& gen) noexcept {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_exponential(Generator& gen) noexcept { return -std::log(uniform_open(gen)); }

double standard_normal(Generator& gen) noexcept {
  const double u1 = uniform_open(gen);
  const double u2 = uniform_open(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_gamma(Generator& gen, double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(gen, shape + 1.0);
    return g * std::exp(std::log(uniform_open(gen)) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(gen);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(gen);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t sample_poisson(Generator& gen, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean >= 30.0) return poisson_ptrs(gen, mean);
  double pmf = std::exp(-mean);
  double u = uniform_open(gen);
  std::uint64_t k = 0;
  // The cap only triggers when rounding leaves u above the accumulated mass.
  while (u > pmf && k < 1000) {
    u -= pmf;
    ++k;
    pmf *= mean / static_cast<double>(k);
  }
  return k;
}

std::uint64_t sample_binomial(Generator& gen, std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial p must lie in [0,1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (p > 0.5) return trials - sample_binomial(gen, trials, 1.0 - p);
  if (static_cast<double>(trials) * p < 10.0) return binomial_inversion(gen, trials, p);
  return binomial_btrs(gen, trials, p);
}

}  // namespace stickperm
