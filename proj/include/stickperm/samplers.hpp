#pragma once

// Three equivalent ways to generate the cycle partition of a permutation
// derived from stick-breaking, plus the exact small-n law as an oracle.
//
//   markov    - decreasing chain n -> n - A_n -> ... -> 0 with decrement
//               matrix q(n,m) = C(n,m) E[W^(n-m) (1-W)^m] / (1 - E W^n);
//               the jump sizes are the cycle lengths.
//   thinning  - occupancy scheme: the m balls still below the current atom
//               split Binomial(m, 1-W) into the next box. O(log n) factor
//               draws; this is the large-n sampler.
//   basic     - the Basic Construction itself: uniform sample points cut by
//               the stick atoms, read left to right.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "stickperm/factor_model.hpp"
#include "stickperm/partition.hpp"
#include "stickperm/random.hpp"

namespace stickperm {

/// Row n of the decrement matrix: probs[m-1] = q(n, m).
struct DecrementRow {
  std::uint64_t n = 0;
  std::vector<double> probs;
  std::vector<double> cumulative;

  double q(std::uint64_t m) const { return probs.at(m - 1); }
  /// Inverse-CDF draw of a jump size in [1, n].
  std::uint64_t sample(Generator& gen) const;
};

DecrementRow decrement_pmf(const FactorModel& model, std::uint64_t n);

/// Memoized decrement rows for one model. Concurrent readers share a lock;
/// a missing row is computed outside the lock and inserted exclusively.
class DecrementTable {
 public:
  explicit DecrementTable(FactorModel model) : model_(std::move(model)) {}

  const FactorModel& model() const noexcept { return model_; }
  std::shared_ptr<const DecrementRow> row(std::uint64_t n) const;

 private:
  FactorModel model_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const DecrementRow>> rows_;
};

CyclePartition sample_partition_markov(const DecrementTable& table, std::uint64_t n, Generator& gen);
CyclePartition sample_partition_markov(const FactorModel& model, std::uint64_t n, Generator& gen);

/// Jump sizes of one chain path in the order they occur (first = last cycle
/// of the Basic Construction).
std::vector<std::uint64_t> sample_decrement_path(const DecrementTable& table, std::uint64_t n, Generator& gen);

CyclePartition sample_partition_thinning(const FactorModel& model, std::uint64_t n, Generator& gen);

/// Occupied box sizes in box order, which is the chain's decrement order.
std::vector<std::uint64_t> sample_box_sizes(const FactorModel& model, std::uint64_t n, Generator& gen);

CycledPermutation sample_permutation_basic(const FactorModel& model, std::uint64_t n, Generator& gen);

/// Exact law of the multiset of decrements for 1 <= n <= 30.
class ExactPartitionLaw {
 public:
  using Parts = std::vector<std::uint32_t>;  // descending

  static constexpr std::uint64_t kMaxN = 30;

  ExactPartitionLaw(std::uint64_t n, std::map<Parts, long double> table)
      : n_(n), table_(std::move(table)) {}

  std::uint64_t n() const noexcept { return n_; }
  const std::map<Parts, long double>& table() const noexcept { return table_; }
  long double probability(const Parts& parts) const;
  long double probability(const CyclePartition& p) const;
  long double total() const;

  /// CSV with columns `partition,probability` (17 significant digits).
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::uint64_t n_;
  std::map<Parts, long double> table_;
};

ExactPartitionLaw::Parts to_parts(const CyclePartition& p);
std::string parts_key(const ExactPartitionLaw::Parts& parts);

ExactPartitionLaw exact_partition_law(const FactorModel& model, std::uint64_t n);

/// k * sum_{j=1}^{floor(n/k)-1} q(n, jk).
double divisibility_bound(const FactorModel& model, std::uint64_t n, std::uint64_t k);
double divisibility_bound(const DecrementRow& row, std::uint64_t k);

/// P_i = W_1 ... W_{i-1} (1 - W_i), i = 1..j.
std::vector<double> frequency_prefix(const FactorModel& model, std::uint64_t j, Generator& gen);

}  // namespace stickperm
