#include "stickperm/cycle_stats.hpp"

#include <cmath>
#include <unordered_map>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

namespace stickperm {

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;
  std::vector<bool> composite(root + 1, false);
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (composite[i]) continue;
    primes_.push_back(i);
    for (std::uint64_t k = i * i; k <= root; k += i) composite[k] = true;
  }
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> PrimeTable::factorize(std::uint64_t r) const {
  if (r == 0) throw DomainError("cannot factorize 0");
  if (r > limit_) throw DomainError("factorization beyond prime table limit");
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (const auto p : primes_) {
    if (p * p > r) break;
    if (r % p) continue;
    std::uint32_t e = 0;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (r > 1) out.emplace_back(r, 1);
  return out;
}

double PrimeExponentProfile::log_value() const {
  CompensatedSum s;
  for (const auto& [p, e] : exponents) s += e * std::log(static_cast<double>(p));
  return s.value();
}

PrimeExponentProfile prime_exponent_profile(const CyclePartition& p, const PrimeTable& primes) {
  PrimeExponentProfile profile;
  for (const auto& entry : p.entries()) {
    for (const auto& [prime, e] : primes.factorize(entry.length)) {
      auto& slot = profile.exponents[prime];
      slot = std::max(slot, e);
    }
  }
  return profile;
}

PrimeExponentProfile prime_exponent_profile(const CyclePartition& p) {
  return prime_exponent_profile(p, PrimeTable(std::max<std::uint64_t>(p.n(), 1)));
}

double log_order(const CyclePartition& p, const PrimeTable& primes) {
  return prime_exponent_profile(p, primes).log_value();
}

double log_order(const CyclePartition& p) { return prime_exponent_profile(p).log_value(); }

boost::multiprecision::cpp_int exact_order(const CyclePartition& p) {
  if (p.n() > kExactOrderMaxN) throw DomainError("exact order is limited to n <= 10000");
  boost::multiprecision::cpp_int order = 1;
  for (const auto& entry : p.entries()) {
    const boost::multiprecision::cpp_int r = entry.length;
    order = boost::multiprecision::lcm(order, r);
  }
  return order;
}

double log_T(const CyclePartition& p) {
  CompensatedSum s;
  for (const auto& entry : p.entries())
    s += static_cast<double>(entry.count) * std::log(static_cast<double>(entry.length));
  return s.value();
}

std::uint64_t d_stat(const CyclePartition& p, std::uint64_t j) {
  if (j == 0) throw DomainError("d_stat needs j >= 1");
  std::uint64_t d = 0;
  for (const auto& entry : p.entries())
    if (entry.length % j == 0) d += entry.count;
  return d;
}

double pittel_gap(const CyclePartition& p, const PrimeTable& primes) {
  struct Slot {
    std::uint64_t prime;
    std::uint64_t d;
  };
  std::unordered_map<std::uint64_t, Slot> powers;  // keyed by p^s
  for (const auto& entry : p.entries()) {
    for (const auto& [prime, e] : primes.factorize(entry.length)) {
      std::uint64_t q = 1;
      for (std::uint32_t s = 1; s <= e; ++s) {
        q *= prime;
        auto& slot = powers.try_emplace(q, Slot{prime, 0}).first->second;
        slot.d += entry.count;
      }
    }
  }
  // Fixed order so the compensated sum is reproducible.
  std::map<std::uint64_t, Slot> ordered(powers.begin(), powers.end());
  CompensatedSum gap;
  for (const auto& [q, slot] : ordered)
    if (slot.d > 1) gap += static_cast<double>(slot.d - 1) * std::log(static_cast<double>(slot.prime));
  return gap.value();
}

double pittel_gap(const CyclePartition& p) {
  return pittel_gap(p, PrimeTable(std::max<std::uint64_t>(p.n(), 1)));
}

double separable(const CyclePartition& p, const std::function<double(std::uint64_t)>& h) {
  CompensatedSum s;
  for (const auto& entry : p.entries()) s += static_cast<double>(entry.count) * h(entry.length);
  return s.value();
}

StatisticRow statistic_row(const CyclePartition& p, const PrimeTable& primes) {
  return {p.n(), p.cycle_count(), log_T(p), log_order(p, primes), pittel_gap(p, primes)};
}

}  // namespace stickperm
