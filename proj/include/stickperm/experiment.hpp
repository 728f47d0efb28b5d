#pragma once

// Reproducible Monte Carlo experiments. Replicate r of grid point g draws
// from make_generator(seed, stream(g), r), so every number in the output is a
// function of (config, seed) alone, whatever the worker count.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stickperm/csv.hpp"
#include "stickperm/factor_model.hpp"
#include "stickperm/limit_laws.hpp"

namespace stickperm {

enum class ExperimentKind { et_clt, exact_oracle, walk, stable_input, poisson, verify_identity, limits };

ExperimentKind parse_kind(std::string_view s);
std::string to_string(ExperimentKind k);

enum class SamplerKind { markov, thinning, basic };

SamplerKind parse_sampler(std::string_view s);
std::string to_string(SamplerKind s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::et_clt;
  std::string model_spec;
  std::optional<LimitCase> case_tag;  // defaults to the model's regime
  std::vector<double> grid;
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  std::optional<std::filesystem::path> detail;  // per-replicate CSV
  unsigned workers = 1;
  double beta = 0.25;                            // poisson kind
  SamplerKind sampler = SamplerKind::thinning;   // et-clt and verify-identity

  /// Applies one `key=value` setting. Keys: kind, model, case, grid, reps,
  /// seed, out, detail, workers, beta, sampler.
  void set(std::string_view key, std::string_view value);
  /// Flat key=value text; blank lines and lines starting with '#' skipped.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Throws ValidationError on any inconsistency.
  void validate() const;
};

std::vector<double> parse_grid(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;
};

struct ExperimentResult {
  ExperimentKind kind;
  Table summary;              // one row per grid point (per sampler for exact-oracle)
  std::optional<Table> detail;
  std::vector<std::string> failures;  // failed built-in checks
  double wall_seconds = 0.0;          // reported, never written to CSV
};

/// Runs body(i) for i in [0, count) on `workers` threads. The first exception
/// by index order is rethrown after all workers finish.
void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body);

ExperimentResult run(const ExperimentConfig& config);

/// Pittel identity check over the configured grid (same as kind
/// verify-identity).
ExperimentResult verify_identity(const ExperimentConfig& config);

}  // namespace stickperm
