#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stickperm/partition.hpp"

namespace stickperm {

/// Primes up to sqrt(limit); enough to factor any integer in [1, limit] by
/// trial division. Immutable after construction.
class PrimeTable {
 public:
  explicit PrimeTable(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return limit_; }
  const std::vector<std::uint64_t>& small_primes() const noexcept { return primes_; }

  /// (p, v_p(r)) for each prime dividing r, ascending in p.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> factorize(std::uint64_t r) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
};

/// Exponent of each prime in the lcm of the represented cycle lengths.
struct PrimeExponentProfile {
  std::map<std::uint64_t, std::uint32_t> exponents;

  /// sum_p e_p log p.
  double log_value() const;
};

PrimeExponentProfile prime_exponent_profile(const CyclePartition& p, const PrimeTable& primes);
PrimeExponentProfile prime_exponent_profile(const CyclePartition& p);

/// log O_n, O_n the lcm of the cycle lengths.
double log_order(const CyclePartition& p, const PrimeTable& primes);
double log_order(const CyclePartition& p);

constexpr std::uint64_t kExactOrderMaxN = 10000;

/// O_n as a big integer; n <= 10^4.
boost::multiprecision::cpp_int exact_order(const CyclePartition& p);

/// log T_n = sum_r K_{n,r} log r.
double log_T(const CyclePartition& p);

/// D_{n,j}: number of cycles whose length is a multiple of j.
std::uint64_t d_stat(const CyclePartition& p, std::uint64_t j);

/// sum_p log p sum_s (D_{n,p^s} - 1)^+, equal to log T_n - log O_n.
/// Only prime powers dividing at least two cycles contribute, so the sum runs
/// over the factorizations of the represented lengths.
double pittel_gap(const CyclePartition& p, const PrimeTable& primes);
double pittel_gap(const CyclePartition& p);

/// sum_r K_{n,r} h(r).
double separable(const CyclePartition& p, const std::function<double(std::uint64_t)>& h);

struct StatisticRow {
  std::uint64_t n;
  std::uint64_t cycles;
  double log_t;
  double log_o;
  double gap;
};

StatisticRow statistic_row(const CyclePartition& p, const PrimeTable& primes);

}  // namespace stickperm
