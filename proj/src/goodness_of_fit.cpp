#include "stickperm/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

namespace stickperm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected) {
  if (observed.empty()) throw DomainError("chi-square of an empty table");
  if (observed.size() != expected.size()) throw ValidationError("observed and expected differ in length");
  struct CellPair {
    double o, e;
  };
  std::vector<CellPair> cells;
  CellPair pooled{0.0, 0.0};
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 0.0 || observed[i] < 0.0) throw ValidationError("negative count in chi-square table");
    if (expected[i] < 5.0) {
      pooled.o += observed[i];
      pooled.e += expected[i];
    } else {
      cells.push_back({observed[i], expected[i]});
    }
  }
  if (pooled.e > 0.0 || pooled.o > 0.0) {
    while (pooled.e < 5.0 && !cells.empty()) {
      auto smallest = std::min_element(cells.begin(), cells.end(),
                                       [](const CellPair& l, const CellPair& r) { return l.e < r.e; });
      pooled.o += smallest->o;
      pooled.e += smallest->e;
      cells.erase(smallest);
    }
    cells.push_back(pooled);
  }
  ChiSquareResult out{0.0, 0, 1.0, cells.size()};
  CompensatedSum stat;
  for (const auto& c : cells) {
    if (c.e == 0.0) {
      if (c.o > 0.0) stat += std::numeric_limits<double>::infinity();
      continue;
    }
    stat += (c.o - c.e) * (c.o - c.e) / c.e;
  }
  out.statistic = stat.value();
  if (cells.size() < 2) return out;
  out.dof = cells.size() - 1;
  if (std::isinf(out.statistic)) {
    out.p_value = 0.0;
  } else {
    const boost::math::chi_squared dist(static_cast<double>(out.dof));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) throw DomainError("chi-square of an empty table");
  if (a.size() != b.size()) throw ValidationError("count vectors differ in length");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
  }
  if (!(na > 0.0 && nb > 0.0)) throw DomainError("chi-square homogeneity needs two nonempty samples");
  // Merge cells by the smaller of the two expected counts.
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> pooled{0.0, 0.0};
  const auto small = [&](double ca, double cb) { return std::min(na, nb) * (ca + cb) / (na + nb) < 5.0; };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (small(a[i], b[i])) {
      pooled.first += a[i];
      pooled.second += b[i];
    } else {
      cells.emplace_back(a[i], b[i]);
    }
  }
  if (pooled.first + pooled.second > 0.0) {
    while (small(pooled.first, pooled.second) && !cells.empty()) {
      auto it = std::min_element(cells.begin(), cells.end(),
                                 [](const auto& l, const auto& r) { return l.first + l.second < r.first + r.second; });
      pooled.first += it->first;
      pooled.second += it->second;
      cells.erase(it);
    }
    cells.push_back(pooled);
  }
  ChiSquareResult out{0.0, 0, 1.0, cells.size()};
  CompensatedSum stat;
  for (const auto& [ca, cb] : cells) {
    const double tot = ca + cb;
    if (tot == 0.0) continue;
    const double ea = na * tot / (na + nb), eb = nb * tot / (na + nb);
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  out.statistic = stat.value();
  if (cells.size() < 2) return out;
  out.dof = cells.size() - 1;
  const boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

std::complex<double> empirical_cf(std::span<const double> samples, double u) {
  if (samples.empty()) throw DomainError("empirical characteristic function of an empty sample");
  CompensatedSum re, im;
  for (const double x : samples) {
    re += std::cos(u * x);
    im += std::sin(u * x);
  }
  const double n = static_cast<double>(samples.size());
  return {re.value() / n, im.value() / n};
}

double ecf_distance(std::span<const double> samples,
                    const std::function<std::complex<double>(double)>& cf,
                    std::span<const double> u_grid) {
  if (samples.empty()) throw DomainError("ECF distance of an empty sample");
  double d = 0.0;
  for (const double u : u_grid) d = std::max(d, std::abs(empirical_cf(samples, u) - cf(u)));
  return d;
}

std::vector<double> standardize(std::span<const double> samples, double b, double a) {
  if (!(a > 0.0)) throw DomainError("standardization needs a > 0");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const double x : samples) out.push_back((x - b) / a);
  return out;
}

SampleSummary summarize(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("summary of an empty sample");
  CompensatedSum s;
  for (const double x : samples) s += x;
  const double n = static_cast<double>(samples.size());
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (const double x : samples) ss += (x - mean) * (x - mean);
  const double var = samples.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {mean, var, samples.size()};
}

}  // namespace stickperm
