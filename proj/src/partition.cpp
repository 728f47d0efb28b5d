#include "stickperm/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace stickperm {

CyclePartition CyclePartition::from_lengths(std::uint64_t n, std::span<const std::uint64_t> lengths) {
  std::vector<std::uint64_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  CyclePartition p;
  p.n_ = n;
  for (std::uint64_t r : sorted) {
    if (!p.entries_.empty() && p.entries_.back().length == r) {
      ++p.entries_.back().count;
    } else {
      p.entries_.push_back({r, 1});
    }
  }
  p.validate();
  return p;
}

CyclePartition CyclePartition::from_counts(std::uint64_t n, std::vector<LengthCount> counts) {
  std::erase_if(counts, [](const LengthCount& e) { return e.count == 0; });
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.length < b.length; });
  CyclePartition p;
  p.n_ = n;
  for (const auto& e : counts) {
    if (!p.entries_.empty() && p.entries_.back().length == e.length) {
      p.entries_.back().count += e.count;
    } else {
      p.entries_.push_back(e);
    }
  }
  p.validate();
  return p;
}

CyclePartition CyclePartition::identity(std::uint64_t n) {
  return from_counts(n, {{1, n}});
}

void CyclePartition::validate() const {
  std::uint64_t mass = 0;
  for (const auto& e : entries_) {
    if (e.length == 0 || e.length > n_) throw std::logic_error("cycle length outside [1,n]");
    mass += e.length * e.count;
  }
  if (mass != n_) {
    throw std::logic_error("cycle partition mass " + std::to_string(mass) + " != n = " + std::to_string(n_));
  }
}

std::uint64_t CyclePartition::cycle_count() const noexcept {
  std::uint64_t k = 0;
  for (const auto& e : entries_) k += e.count;
  return k;
}

std::uint64_t CyclePartition::count(std::uint64_t r) const noexcept {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), r,
                                   [](const LengthCount& e, std::uint64_t v) { return e.length < v; });
  return it != entries_.end() && it->length == r ? it->count : 0;
}

std::vector<std::uint64_t> CyclePartition::lengths_descending() const {
  std::vector<std::uint64_t> out;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) out.insert(out.end(), it->count, it->length);
  return out;
}

std::string CyclePartition::key() const {
  std::string s;
  for (std::uint64_t r : lengths_descending()) {
    if (!s.empty()) s += '+';
    s += std::to_string(r);
  }
  return s;
}

CycledPermutation::CycledPermutation(std::vector<std::vector<std::uint32_t>> cycles)
    : cycles_(std::move(cycles)) {
  for (const auto& c : cycles_) n_ += c.size();
  std::vector<bool> seen(n_ + 1, false);
  for (const auto& c : cycles_) {
    if (c.empty()) throw std::logic_error("empty cycle");
    for (std::uint32_t label : c) {
      if (label == 0 || label > n_ || seen[label]) throw std::logic_error("cycle labels must partition [n]");
      seen[label] = true;
    }
  }
}

CyclePartition CycledPermutation::partition() const {
  std::vector<std::uint64_t> lengths;
  lengths.reserve(cycles_.size());
  for (const auto& c : cycles_) lengths.push_back(c.size());
  return CyclePartition::from_lengths(n_, lengths);
}

std::vector<std::uint32_t> CycledPermutation::one_line() const {
  std::vector<std::uint32_t> image(n_);
  for (const auto& c : cycles_) {
    for (std::size_t i = 0; i < c.size(); ++i) image[c[i] - 1] = c[(i + 1) % c.size()];
  }
  return image;
}

namespace {
std::string format_cycles(const std::vector<std::vector<std::uint32_t>>& cycles) {
  std::string s;
  for (const auto& c : cycles) {
    s += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(c[i]);
    }
    s += ')';
  }
  return s;
}
}  // namespace

std::string CycledPermutation::to_string() const { return format_cycles(cycles_); }

std::string CycledPermutation::to_standard_string() const {
  auto cycles = cycles_;
  for (auto& c : cycles) std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
  std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return format_cycles(cycles);
}

CycledPermutation assemble_from_blocks(std::span<const std::uint32_t> labels,
                                       std::span<const std::uint64_t> block) {
  if (labels.size() != block.size()) throw std::invalid_argument("labels and blocks differ in length");
  std::vector<std::vector<std::uint32_t>> cycles;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == 0 || block[i] != block[i - 1]) cycles.emplace_back();
    cycles.back().push_back(labels[i]);
  }
  return CycledPermutation(std::move(cycles));
}

CycledPermutation assemble_permutation(std::span<const double> u, std::span<const double> atoms) {
  std::vector<std::uint32_t> labels(u.size());
  std::iota(labels.begin(), labels.end(), 1u);
  std::sort(labels.begin(), labels.end(), [&](std::uint32_t a, std::uint32_t b) { return u[a - 1] < u[b - 1]; });
  std::vector<std::uint64_t> block(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double point = u[labels[i] - 1];
    // Interval j is (Q_{j+1}, Q_j]; atoms descend, so find the last Q_j >= point.
    std::size_t j = 0;
    while (j + 1 < atoms.size() && atoms[j + 1] >= point) ++j;
    if (j + 1 >= atoms.size()) throw std::invalid_argument("stick atoms do not cover every sample point");
    block[i] = j;
  }
  return assemble_from_blocks(labels, block);
}

}  // namespace stickperm
