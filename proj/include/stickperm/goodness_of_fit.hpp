#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stickperm {

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov distance between the sample's empirical CDF
/// and a continuous CDF, sup over all x (both one-sided gaps at each jump).
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic;
  std::uint64_t dof;
  double p_value;
  std::size_t bins;  // after pooling
};

/// Pearson goodness of fit of observed counts against expected counts.
/// Cells with expected < 5 are pooled into one cell (merged further with the
/// smallest remaining cell while it stays below 5).
ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected);

/// Homogeneity test of two count vectors over the same cells (2 x k table).
/// Cells whose pooled expected count is below 5 are merged as in chi_square.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b);

/// max over the grid of |mean exp(i u X) - cf(u)|.
double ecf_distance(std::span<const double> samples,
                    const std::function<std::complex<double>(double)>& cf,
                    std::span<const double> u_grid);

std::complex<double> empirical_cf(std::span<const double> samples, double u);

/// (x - b) / a elementwise.
std::vector<double> standardize(std::span<const double> samples, double b, double a);

struct SampleSummary {
  double mean;
  double variance;  // unbiased
  std::size_t count;
};

SampleSummary summarize(std::span<const double> samples);

}  // namespace stickperm
