#include <algorithm>
#include <fstream>

#include "stickperm/csv.hpp"
#include "stickperm/errors.hpp"
#include "stickperm/samplers.hpp"

namespace stickperm {

ExactPartitionLaw::Parts to_parts(const CyclePartition& p) {
  ExactPartitionLaw::Parts parts;
  for (auto len : p.lengths_descending()) parts.push_back(static_cast<std::uint32_t>(len));
  return parts;
}

std::string parts_key(const ExactPartitionLaw::Parts& parts) {
  std::string key;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) key += '+';
    key += std::to_string(parts[i]);
  }
  return key;
}

long double ExactPartitionLaw::probability(const Parts& parts) const {
  const auto it = table_.find(parts);
  return it == table_.end() ? 0.0L : it->second;
}

long double ExactPartitionLaw::probability(const CyclePartition& p) const {
  if (p.n() != n_) return 0.0L;
  return probability(to_parts(p));
}

long double ExactPartitionLaw::total() const {
  long double s = 0.0L;
  for (const auto& [parts, prob] : table_) s += prob;
  return s;
}

void ExactPartitionLaw::write_csv(std::ostream& out) const {
  out << "partition,probability\n";
  for (const auto& [parts, prob] : table_) out << parts_key(parts) << ',' << format_real(prob) << '\n';
}

void ExactPartitionLaw::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out);
}

ExactPartitionLaw exact_partition_law(const FactorModel& model, std::uint64_t n) {
  if (n == 0 || n > ExactPartitionLaw::kMaxN)
    throw DomainError("exact partition law is available for 1 <= n <= 30");
  using Parts = ExactPartitionLaw::Parts;
  // level[k] is the law of the decrement multiset started from k. The first
  // jump m leaves a fresh chain at k - m, so level[k] is pushed forward from
  // level[k - m] by inserting m.
  std::vector<std::map<Parts, long double>> level(n + 1);
  level[0][Parts{}] = 1.0L;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const DecrementRow row = decrement_pmf(model, k);
    auto& here = level[k];
    for (std::uint64_t m = 1; m <= k; ++m) {
      const long double q = row.q(m);
      if (q == 0.0L) continue;
      for (const auto& [rest, prob] : level[k - m]) {
        Parts parts = rest;
        const auto at = std::find_if(parts.begin(), parts.end(),
                                     [m](std::uint32_t x) { return x <= m; });
        parts.insert(at, static_cast<std::uint32_t>(m));
        here[std::move(parts)] += q * prob;
      }
    }
  }
  return ExactPartitionLaw(n, std::move(level[n]));
}

}  // namespace stickperm
