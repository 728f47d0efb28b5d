#include "stickperm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

namespace stickperm {

std::uint64_t DecrementRow::sample(Generator& gen) const {
  const double u = uniform_open(gen);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<std::uint64_t>(it - cumulative.begin());
  // u above the rounded total lands on the largest jump.
  return std::min<std::uint64_t>(idx + 1, n);
}

DecrementRow decrement_pmf(const FactorModel& model, std::uint64_t n) {
  if (n == 0) throw DomainError("decrement row needs n >= 1");
  DecrementRow row;
  row.n = n;
  row.probs.resize(n);
  row.cumulative.resize(n);
  const double log_denominator = model.log_one_minus_power_moment(n);
  CompensatedSum acc;
  for (std::uint64_t m = 1; m <= n; ++m) {
    const double q = std::exp(model.log_binomial_moment(n, m) - log_denominator);
    row.probs[m - 1] = q;
    acc += q;
    row.cumulative[m - 1] = acc.value();
  }
  return row;
}

std::shared_ptr<const DecrementRow> DecrementTable::row(std::uint64_t n) const {
  {
    std::shared_lock lock(mutex_);
    if (auto it = rows_.find(n); it != rows_.end()) return it->second;
  }
  auto fresh = std::make_shared<const DecrementRow>(decrement_pmf(model_, n));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = rows_.emplace(n, std::move(fresh));
  return it->second;
}

std::vector<std::uint64_t> sample_decrement_path(const DecrementTable& table, std::uint64_t n, Generator& gen) {
  if (n == 0) throw DomainError("partition size must be >= 1");
  std::vector<std::uint64_t> jumps;
  std::uint64_t state = n;
  while (state > 0) {
    const std::uint64_t m = table.row(state)->sample(gen);
    jumps.push_back(m);
    state -= m;
  }
  return jumps;
}

CyclePartition sample_partition_markov(const DecrementTable& table, std::uint64_t n, Generator& gen) {
  const auto jumps = sample_decrement_path(table, n, gen);
  return CyclePartition::from_lengths(n, jumps);
}

CyclePartition sample_partition_markov(const FactorModel& model, std::uint64_t n, Generator& gen) {
  const DecrementTable table(model);
  return sample_partition_markov(table, n, gen);
}

std::vector<std::uint64_t> sample_box_sizes(const FactorModel& model, std::uint64_t n, Generator& gen) {
  if (n == 0) throw DomainError("partition size must be >= 1");
  std::vector<std::uint64_t> boxes;
  std::uint64_t remaining = n;
  while (remaining > 0) {
    const FactorDraw d = model.draw(gen);
    const std::uint64_t hits = sample_binomial(gen, remaining, d.one_minus_w);
    if (hits == 0) continue;
    boxes.push_back(hits);
    remaining -= hits;
  }
  return boxes;
}

CyclePartition sample_partition_thinning(const FactorModel& model, std::uint64_t n, Generator& gen) {
  const auto boxes = sample_box_sizes(model, n, gen);
  return CyclePartition::from_lengths(n, boxes);
}

CycledPermutation sample_permutation_basic(const FactorModel& model, std::uint64_t n, Generator& gen) {
  if (n == 0) throw DomainError("permutation size must be >= 1");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw DomainError("permutation size exceeds label range");
  // Additive coordinates: E_i = -log U_i, atoms S_j = -log Q_j. Interval
  // (Q_{j+1}, Q_j] becomes [S_j, S_{j+1}).
  std::vector<double> e(n);
  for (auto& v : e) v = standard_exponential(gen);
  const double deepest = *std::max_element(e.begin(), e.end());
  std::vector<double> atoms{0.0};
  while (atoms.back() <= deepest) atoms.push_back(atoms.back() + model.draw(gen).xi);

  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), 1u);
  // Increasing U is decreasing E.
  std::sort(labels.begin(), labels.end(), [&](std::uint32_t a, std::uint32_t b) {
    return e[a - 1] != e[b - 1] ? e[a - 1] > e[b - 1] : a < b;
  });
  std::vector<std::uint64_t> block(n);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::upper_bound(atoms.begin(), atoms.end(), e[labels[i] - 1]);
    block[i] = static_cast<std::uint64_t>(it - atoms.begin()) - 1;
  }
  return assemble_from_blocks(labels, block);
}

double divisibility_bound(const DecrementRow& row, std::uint64_t k) {
  if (k == 0 || k > row.n) throw DomainError("divisibility bound needs 1 <= k <= n");
  const std::uint64_t top = row.n / k;
  CompensatedSum s;
  for (std::uint64_t j = 1; j + 1 <= top; ++j) s += row.q(j * k);
  return static_cast<double>(k) * s.value();
}

double divisibility_bound(const FactorModel& model, std::uint64_t n, std::uint64_t k) {
  return divisibility_bound(decrement_pmf(model, n), k);
}

std::vector<double> frequency_prefix(const FactorModel& model, std::uint64_t j, Generator& gen) {
  if (j == 0) throw DomainError("frequency prefix length must be >= 1");
  std::vector<double> p;
  p.reserve(j);
  double remaining = 1.0;  // W_1 ... W_{i-1}
  for (std::uint64_t i = 0; i < j; ++i) {
    FactorDraw d = model.draw(gen);
    while (d.w <= 0.0) d = model.draw(gen);
    p.push_back(remaining * d.one_minus_w);
    remaining *= d.w;
  }
  return p;
}

}  // namespace stickperm
