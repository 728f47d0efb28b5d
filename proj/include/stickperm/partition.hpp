#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stickperm {

struct LengthCount {
  std::uint64_t length;
  std::uint64_t count;

  friend bool operator==(const LengthCount&, const LengthCount&) = default;
};

/// Cycle counts (K_{n,1}, ..., K_{n,n}) stored sparsely, ascending by length.
class CyclePartition {
 public:
  CyclePartition() = default;

  /// Throws std::logic_error unless the lengths are in [1,n] and sum to n.
  static CyclePartition from_lengths(std::uint64_t n, std::span<const std::uint64_t> lengths);
  static CyclePartition from_counts(std::uint64_t n, std::vector<LengthCount> counts);
  static CyclePartition identity(std::uint64_t n);

  std::uint64_t n() const noexcept { return n_; }
  /// K_n, the total number of cycles.
  std::uint64_t cycle_count() const noexcept;
  /// K_{n,r}; zero for absent lengths.
  std::uint64_t count(std::uint64_t r) const noexcept;
  std::span<const LengthCount> entries() const noexcept { return entries_; }

  /// Lengths with multiplicity, descending.
  std::vector<std::uint64_t> lengths_descending() const;
  /// Canonical text key, lengths descending joined by '+', e.g. "4+3+2".
  std::string key() const;

  friend bool operator==(const CyclePartition&, const CyclePartition&) = default;

 private:
  void validate() const;

  std::uint64_t n_ = 0;
  std::vector<LengthCount> entries_;
};

/// Cycles written in the natural left-to-right order of the sample points.
/// Labels are 1-based.
class CycledPermutation {
 public:
  explicit CycledPermutation(std::vector<std::vector<std::uint32_t>> cycles);

  std::size_t n() const noexcept { return n_; }
  const std::vector<std::vector<std::uint32_t>>& cycles() const noexcept { return cycles_; }

  CyclePartition partition() const;
  /// sigma(i) for i in [1,n], as a one-line array indexed from 0.
  std::vector<std::uint32_t> one_line() const;
  /// Cycle notation as written, e.g. "(7)(3 4 2 5)(6 1)".
  std::string to_string() const;
  /// Cycles rotated to start at their minimum and sorted by that minimum.
  std::string to_standard_string() const;

 private:
  std::vector<std::vector<std::uint32_t>> cycles_;
  std::size_t n_ = 0;
};

/// Builds the permutation of the Basic Construction from sample points u
/// (u[i] is the point of label i+1) and descending stick atoms
/// 1 = Q_0 > Q_1 > ... with Q_last below every sample point.
CycledPermutation assemble_permutation(std::span<const double> u, std::span<const double> atoms);

}  // namespace stickperm

namespace stickperm {

/// Cuts `labels` (already sorted by increasing sample point) into cycles at
/// every change of `block` (block[i] is the stick interval of labels[i]).
CycledPermutation assemble_from_blocks(std::span<const std::uint32_t> labels,
                                       std::span<const std::uint64_t> block);

}  // namespace stickperm
