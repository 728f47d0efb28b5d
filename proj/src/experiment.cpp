#include "stickperm/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "stickperm/cycle_stats.hpp"
#include "stickperm/errors.hpp"
#include "stickperm/goodness_of_fit.hpp"
#include "stickperm/numerics.hpp"
#include "stickperm/perturbed_walk.hpp"
#include "stickperm/samplers.hpp"

namespace stickperm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMaxMarkovN = 10000;
constexpr std::uint64_t kMaxBasicN = 10000000;
constexpr double kIdentityTolerance = 1e-9;
constexpr double kOracleMinP = 1e-3;
const std::vector<double> kCfGrid{-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ValidationError(std::string(key) + ": bad number '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
  // Accept integral values written in floating notation, e.g. 1e5.
  const double d = parse_real(key, text);
  if (!(d >= 0.0) || d != std::floor(d) || d >= 0x1.0p64)
    throw ValidationError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return static_cast<std::uint64_t>(d);
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

std::uint64_t as_size(double v) { return static_cast<std::uint64_t>(v); }

Cell cell(double v) { return v; }
Cell cell(std::uint64_t v) { return v; }
Cell cell(std::string v) { return v; }

std::string sampler_limit_message(SamplerKind s, std::uint64_t limit) {
  return "sampler " + to_string(s) + " supports n <= " + std::to_string(limit);
}

CyclePartition draw_partition(SamplerKind sampler, const FactorModel& model, const DecrementTable* table,
                              std::uint64_t n, Generator& gen) {
  switch (sampler) {
    case SamplerKind::markov: return sample_partition_markov(*table, n, gen);
    case SamplerKind::thinning: return sample_partition_thinning(model, n, gen);
    case SamplerKind::basic: return sample_permutation_basic(model, n, gen).partition();
  }
  throw ValidationError("unknown sampler");
}

double big_log(const boost::multiprecision::cpp_int& v) {
  const auto bits = boost::multiprecision::msb(v);
  if (bits < 60) return std::log(v.convert_to<double>());
  const auto shift = bits - 60;
  const boost::multiprecision::cpp_int top = v >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

struct TargetLaw {
  std::function<double(double)> cdf;
  std::function<std::complex<double>(double)> cf;
};

TargetLaw standard_target(LimitCase c, double alpha) {
  if (c == LimitCase::c) {
    auto law = std::make_shared<StableLaw>(alpha);
    return {[law](double x) { return law->cdf(x); }, [law](double u) { return law->cf(u); }};
  }
  return {normal_cdf, [](double u) { return std::complex<double>(std::exp(-0.5 * u * u), 0.0); }};
}

/// Limit of the integrated walk: N(0, 1/3) or (alpha+1)^(-1/alpha) Z.
TargetLaw integrated_target(LimitCase c, double alpha) {
  if (c == LimitCase::c) {
    auto law = std::make_shared<StableLaw>(integrated_stable_law(alpha));
    return {[law](double x) { return law->cdf(x); }, [law](double u) { return law->cf(u); }};
  }
  return {[](double x) { return normal_cdf(x * std::sqrt(3.0)); },
          [](double u) { return std::complex<double>(std::exp(-u * u / 6.0), 0.0); }};
}

double tail_alpha(const FactorModel& model, LimitCase c) {
  return c == LimitCase::c ? c_sequence_for(model, c).alpha : kNaN;
}

LimitCase resolve_case(const ExperimentConfig& config, const FactorModel& model) {
  return config.case_tag ? *config.case_tag : default_case(model);
}

/// Runs one grid point; any exception becomes the row's error marker.
template <class Body>
void guarded_row(std::vector<Cell>& row, std::size_t error_column, Body&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    row[error_column] = std::string(e.what());
  }
}

std::vector<Cell> blank_row(std::size_t width) {
  return std::vector<Cell>(width, Cell{std::string()});
}

// ------------------------------------------------------------------ et-clt

ExperimentResult run_et_clt(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "n", "sampler", "replicates", "seed", "stream", "case",
                           "b_n", "a_n", "mean_logT", "var_logT", "mean_logO", "var_logO",
                           "mean_std_T", "var_std_T", "ks_T", "ks_T_empirical", "ecf_T",
                           "mean_std_O", "var_std_O", "ks_O", "ks_O_empirical", "ecf_O", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail) result.detail = Table{{"n", "replicate", "K_n", "logT", "logO", "gap"}, {}};
  const LimitCase case_tag = resolve_case(config, model);
  const double alpha = tail_alpha(model, case_tag);
  const TargetLaw target = standard_target(case_tag, alpha);
  const DecrementTable table(model);

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const std::uint64_t n = as_size(config.grid[g]);
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(n);
    row[2] = to_string(config.sampler);
    row[3] = cell(config.replicates);
    row[4] = cell(config.seed);
    row[5] = cell(std::uint64_t{g});
    row[6] = to_string(case_tag);
    guarded_row(row, width - 1, [&] {
      const PrimeTable primes(n);
      std::vector<StatisticRow> stats(config.replicates);
      parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
        Generator gen = make_generator(config.seed, g, r);
        stats[r] = statistic_row(draw_partition(config.sampler, model, &table, n, gen), primes);
      });
      std::vector<double> log_t, log_o;
      for (const auto& s : stats) {
        log_t.push_back(s.log_t);
        log_o.push_back(s.log_o);
      }
      if (result.detail) {
        for (std::uint64_t r = 0; r < stats.size(); ++r)
          result.detail->rows.push_back({cell(n), cell(r), cell(stats[r].cycles), cell(stats[r].log_t),
                                         cell(stats[r].log_o), cell(stats[r].gap)});
      }
      const auto st = summarize(log_t), so = summarize(log_o);
      row[9] = cell(st.mean);
      row[10] = cell(st.variance);
      row[11] = cell(so.mean);
      row[12] = cell(so.variance);
      const auto empirical_ks = [&](const std::vector<double>& v, const SampleSummary& s) {
        if (case_tag == LimitCase::c || !(s.variance > 0.0)) return kNaN;
        return ks_statistic(standardize(v, s.mean, std::sqrt(s.variance)), normal_cdf);
      };
      row[16] = cell(empirical_ks(log_t, st));
      row[21] = cell(empirical_ks(log_o, so));
      const LimitNormalization norm = normalization(model, static_cast<double>(n), case_tag);
      row[7] = cell(norm.b);
      row[8] = cell(norm.a);
      const auto zt = standardize(log_t, norm.b, norm.a);
      const auto zo = standardize(log_o, norm.b, norm.a);
      const auto zts = summarize(zt), zos = summarize(zo);
      row[13] = cell(zts.mean);
      row[14] = cell(zts.variance);
      row[15] = cell(ks_statistic(zt, target.cdf));
      row[17] = cell(ecf_distance(zt, target.cf, kCfGrid));
      row[18] = cell(zos.mean);
      row[19] = cell(zos.variance);
      row[20] = cell(ks_statistic(zo, target.cdf));
      row[22] = cell(ecf_distance(zo, target.cf, kCfGrid));
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

// ------------------------------------------------------------ exact-oracle

ExperimentResult run_exact_oracle(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "n", "sampler", "replicates", "seed", "stream", "cells",
                           "pooled_cells", "chi2", "dof", "p_value", "total_probability", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail)
    result.detail = Table{{"n", "partition", "probability", "markov", "thinning", "basic"}, {}};
  const DecrementTable table(model);
  const SamplerKind samplers[] = {SamplerKind::markov, SamplerKind::thinning, SamplerKind::basic};

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const std::uint64_t n = as_size(config.grid[g]);
    std::optional<ExactPartitionLaw> law;
    std::string law_error;
    try {
      law = exact_partition_law(model, n);
    } catch (const std::exception& e) {
      law_error = e.what();
    }
    std::map<ExactPartitionLaw::Parts, std::size_t> index;
    if (law)
      for (const auto& [parts, prob] : law->table()) index.emplace(parts, index.size());
    std::vector<std::vector<double>> observed(3);

    for (std::size_t s = 0; s < 3; ++s) {
      const std::uint64_t stream = 3 * g + s;
      auto row = blank_row(width);
      row[0] = cell(std::uint64_t{g});
      row[1] = cell(n);
      row[2] = to_string(samplers[s]);
      row[3] = cell(config.replicates);
      row[4] = cell(config.seed);
      row[5] = cell(stream);
      if (!law) {
        row[width - 1] = law_error;
        result.summary.rows.push_back(std::move(row));
        continue;
      }
      guarded_row(row, width - 1, [&] {
        // Last slot collects partitions the exact law gives probability 0.
        std::vector<std::size_t> hit(config.replicates);
        parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
          Generator gen = make_generator(config.seed, stream, r);
          const auto parts = to_parts(draw_partition(samplers[s], model, &table, n, gen));
          const auto it = index.find(parts);
          hit[r] = it == index.end() ? index.size() : it->second;
        });
        std::vector<double> obs(index.size() + 1, 0.0), expected(index.size() + 1, 0.0);
        for (const auto h : hit) obs[h] += 1.0;
        for (const auto& [parts, i] : index)
          expected[i] = static_cast<double>(config.replicates) * static_cast<double>(law->probability(parts));
        observed[s] = obs;
        const ChiSquareResult chi = chi_square(obs, expected);
        row[6] = cell(std::uint64_t{index.size()});
        row[7] = cell(std::uint64_t{chi.bins});
        row[8] = cell(chi.statistic);
        row[9] = cell(chi.dof);
        row[10] = cell(chi.p_value);
        row[11] = cell(static_cast<double>(law->total()));
        if (!(chi.p_value > kOracleMinP))
          result.failures.push_back("exact-oracle n=" + std::to_string(n) + " sampler=" + to_string(samplers[s]) +
                                    ": chi-square p-value " + format_real(chi.p_value));
      });
      result.summary.rows.push_back(std::move(row));
    }
    if (result.detail && law) {
      for (const auto& [parts, i] : index) {
        std::vector<Cell> d{cell(n), cell(parts_key(parts)), cell(format_real(law->probability(parts)))};
        for (std::size_t s = 0; s < 3; ++s)
          d.push_back(observed[s].empty() ? Cell{std::string()} : Cell{static_cast<std::uint64_t>(observed[s][i])});
        result.detail->rows.push_back(std::move(d));
      }
    }
  }
  return result;
}

// -------------------------------------------------------------------- walk

ExperimentResult run_walk(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "x", "replicates", "seed", "stream", "case", "c_x",
                           "mean_rho", "mean_N", "mean_M", "mean_sq_N_minus_M_over_x",
                           "mean_I_norm", "var_I_norm", "ks_I", "ecf_I",
                           "mean_J_norm", "var_J_norm", "ks_J", "ecf_J", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail) result.detail = Table{{"x", "replicate", "rho", "N", "M", "I_norm", "J_norm"}, {}};
  const LimitCase case_tag = resolve_case(config, model);
  const TargetLaw target = integrated_target(case_tag, tail_alpha(model, case_tag));
  const double mu = model.log_moments().mu;

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const double x = config.grid[g];
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(x);
    row[2] = cell(config.replicates);
    row[3] = cell(config.seed);
    row[4] = cell(std::uint64_t{g});
    row[5] = to_string(case_tag);
    guarded_row(row, width - 1, [&] {
      const double c = walk_scale(model, x, case_tag);
      row[6] = cell(c);
      const double r2 = model.r_star_integral(x);
      std::vector<WalkSnapshot> snaps(config.replicates);
      parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
        Generator gen = make_generator(config.seed, g, r);
        const WalkPath path = simulate_path(model, x, gen);
        WalkSnapshot s{path.rho_at(x), path.n_at(x), path.m_at(x, model), path.integral_I(x, mu, r2),
                       path.integral_J(x, mu)};
        if (s.n > s.rho) throw std::logic_error("N(x) > rho(x) on a walk path");
        snaps[r] = s;
      });
      const double norm = x * c;
      std::vector<double> rho, nn, mm, sq, inorm, jnorm;
      for (const auto& s : snaps) {
        rho.push_back(static_cast<double>(s.rho));
        nn.push_back(static_cast<double>(s.n));
        mm.push_back(s.m);
        const double d = static_cast<double>(s.n) - s.m;
        sq.push_back(d * d / x);
        inorm.push_back(s.i / norm);
        jnorm.push_back(s.j / norm);
      }
      if (result.detail) {
        for (std::uint64_t r = 0; r < snaps.size(); ++r)
          result.detail->rows.push_back({cell(x), cell(r), cell(snaps[r].rho), cell(snaps[r].n), cell(snaps[r].m),
                                         cell(inorm[r]), cell(jnorm[r])});
      }
      const auto si = summarize(inorm), sj = summarize(jnorm);
      row[7] = cell(summarize(rho).mean);
      row[8] = cell(summarize(nn).mean);
      row[9] = cell(summarize(mm).mean);
      row[10] = cell(summarize(sq).mean);
      row[11] = cell(si.mean);
      row[12] = cell(si.variance);
      row[13] = cell(ks_statistic(inorm, target.cdf));
      row[14] = cell(ecf_distance(inorm, target.cf, kCfGrid));
      row[15] = cell(sj.mean);
      row[16] = cell(sj.variance);
      row[17] = cell(ks_statistic(jnorm, target.cdf));
      row[18] = cell(ecf_distance(jnorm, target.cf, kCfGrid));
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

// ------------------------------------------------------------ stable-input

ExperimentResult run_stable_input(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "n", "replicates", "seed", "stream", "alpha", "c_n",
                           "mean", "ks", "ecf", "ecf_unreflected", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail) result.detail = Table{{"n", "replicate", "value"}, {}};
  const CSequence seq = c_sequence_for(model, LimitCase::c);
  const StableLaw law(seq.alpha);
  const double mu = model.log_moments().mu;

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const std::uint64_t n = as_size(config.grid[g]);
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(n);
    row[2] = cell(config.replicates);
    row[3] = cell(config.seed);
    row[4] = cell(std::uint64_t{g});
    row[5] = cell(seq.alpha);
    guarded_row(row, width - 1, [&] {
      const double c = solve_c(seq.alpha, seq.ell, static_cast<double>(n));
      row[6] = cell(c);
      // Counting-process orientation: rho(x) - x/mu behaves like
      // (n mu - S_n) / mu, so the reflected sum is the one with limit Z.
      std::vector<double> value(config.replicates);
      parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
        Generator gen = make_generator(config.seed, g, r);
        CompensatedSum s;
        for (std::uint64_t k = 0; k < n; ++k) s += model.draw(gen).xi;
        value[r] = (static_cast<double>(n) * mu - s.value()) / c;
      });
      std::vector<double> unreflected;
      for (const double v : value) unreflected.push_back(-v);
      if (result.detail)
        for (std::uint64_t r = 0; r < value.size(); ++r) result.detail->rows.push_back({cell(n), cell(r), cell(value[r])});
      const auto cf = [&](double u) { return law.cf(u); };
      row[7] = cell(summarize(value).mean);
      row[8] = cell(ks_statistic(value, [&](double v) { return law.cdf(v); }));
      row[9] = cell(ecf_distance(value, cf, kCfGrid));
      row[10] = cell(ecf_distance(unreflected, cf, kCfGrid));
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

// ----------------------------------------------------------------- poisson

ExperimentResult run_poisson(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "t", "replicates", "seed", "stream", "beta", "f1_minus_log_t",
                           "lower_p", "upper_inv_t", "bounds_hold", "q", "tail_fraction", "tail_holds",
                           "h", "mean_V", "se_V", "V_ratio", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail) result.detail = Table{{"t", "replicate", "balls", "V"}, {}};
  const double mu = model.log_moments().mu;

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const double t = config.grid[g];
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(t);
    row[2] = cell(config.replicates);
    row[3] = cell(config.seed);
    row[4] = cell(std::uint64_t{g});
    row[5] = cell(config.beta);
    guarded_row(row, width - 1, [&] {
      const double gap = f_moment(1, t) - std::log(t);
      const double lower = poisson_deviation_lower(t, config.beta);
      const double q = poisson_deviation_bound(t, config.beta);
      const bool bounds = lower <= gap && gap <= 1.0 / t;
      row[6] = cell(gap);
      row[7] = cell(lower);
      row[8] = cell(1.0 / t);
      row[9] = std::string(bounds ? "yes" : "no");
      row[10] = cell(q);
      row[13] = cell(h_var(t));
      const double cut = (1.0 - std::pow(t, -config.beta)) * t;
      std::vector<std::uint64_t> balls(config.replicates);
      std::vector<double> v(config.replicates);
      // Same consumption order as sample_V: the Poisson count, then the
      // partition of that many balls.
      parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
        Generator gen = make_generator(config.seed, g, r);
        balls[r] = sample_poisson(gen, t);
        v[r] = balls[r] == 0 ? 0.0 : log_T(sample_partition_thinning(model, balls[r], gen));
      });
      std::uint64_t low = 0;
      for (const auto b : balls)
        if (static_cast<double>(b) <= cut) ++low;
      const double fraction = static_cast<double>(low) / static_cast<double>(config.replicates);
      row[11] = cell(fraction);
      row[12] = std::string(fraction <= q ? "yes" : "no");
      const auto sv = summarize(v);
      const double l = std::log(t);
      row[14] = cell(sv.mean);
      row[15] = cell(std::sqrt(sv.variance / static_cast<double>(sv.count)));
      row[16] = cell(sv.mean / (0.5 * l * l / mu));
      if (result.detail)
        for (std::uint64_t r = 0; r < v.size(); ++r) result.detail->rows.push_back({cell(t), cell(r), cell(balls[r]), cell(v[r])});
      if (!bounds) result.failures.push_back("poisson t=" + format_real(t) + ": f1(t) - log t outside [p(t), 1/t]");
      if (fraction > q) result.failures.push_back("poisson t=" + format_real(t) + ": empirical lower tail exceeds q(t)");
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

// --------------------------------------------------------- verify-identity

ExperimentResult run_verify_identity(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{ExperimentKind::verify_identity, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "n", "sampler", "replicates", "seed", "stream", "max_residual",
                           "max_exact_residual", "mean_gap", "gap_ratio", "gap_ratio_loglog", "failures", "error"};
  const std::size_t width = result.summary.header.size();
  if (config.detail) result.detail = Table{{"n", "replicate", "K_n", "logT", "logO", "gap"}, {}};
  const DecrementTable table(model);

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const std::uint64_t n = as_size(config.grid[g]);
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(n);
    row[2] = to_string(config.sampler);
    row[3] = cell(config.replicates);
    row[4] = cell(config.seed);
    row[5] = cell(std::uint64_t{g});
    guarded_row(row, width - 1, [&] {
      const PrimeTable primes(n);
      const bool exact = n <= kExactOrderMaxN;
      struct Check {
        StatisticRow stats;
        double residual;
        double exact_residual;
        std::string key;
      };
      std::vector<Check> checks(config.replicates);
      parallel_for(config.replicates, config.workers, [&](std::uint64_t r) {
        Generator gen = make_generator(config.seed, g, r);
        const CyclePartition p = draw_partition(config.sampler, model, &table, n, gen);
        Check c{statistic_row(p, primes), 0.0, kNaN, {}};
        c.residual = std::abs(c.stats.log_t - c.stats.log_o - c.stats.gap);
        if (exact) {
          // T_n / O_n as an exact integer, independent of the prime-power sum.
          boost::multiprecision::cpp_int t = 1;
          for (const auto& e : p.entries())
            for (std::uint64_t k = 0; k < e.count; ++k) t *= e.length;
          const auto o = exact_order(p);
          if (t % o != 0) throw std::logic_error("order does not divide the product of cycle lengths");
          c.exact_residual = std::max(std::abs(big_log(t / o) - c.stats.gap), std::abs(big_log(o) - c.stats.log_o));
        }
        if (c.residual > kIdentityTolerance || c.exact_residual > kIdentityTolerance) c.key = p.key();
        checks[r] = std::move(c);
      });
      double max_res = 0.0, max_exact = exact ? 0.0 : kNaN;
      std::uint64_t failed = 0;
      std::vector<double> gaps;
      for (std::uint64_t r = 0; r < checks.size(); ++r) {
        const auto& c = checks[r];
        max_res = std::max(max_res, c.residual);
        if (exact) max_exact = std::max(max_exact, c.exact_residual);
        gaps.push_back(c.stats.gap);
        if (!c.key.empty()) {
          ++failed;
          std::string key = c.key.size() > 200 ? c.key.substr(0, 200) + "..." : c.key;
          result.failures.push_back("identity n=" + std::to_string(n) + " replicate=" + std::to_string(r) +
                                    " partition=" + key);
        }
        if (result.detail)
          result.detail->rows.push_back({cell(n), cell(r), cell(c.stats.cycles), cell(c.stats.log_t),
                                         cell(c.stats.log_o), cell(c.stats.gap)});
      }
      const double l = std::log(static_cast<double>(n));
      const double mean_gap = summarize(gaps).mean;
      const double ll = std::log(l);
      row[6] = cell(max_res);
      row[7] = cell(max_exact);
      row[8] = cell(mean_gap);
      row[9] = cell(l > 0.0 ? mean_gap / std::pow(l, 1.5) : kNaN);
      row[10] = cell(ll > 0.0 ? mean_gap / (l * ll * ll) : kNaN);
      row[11] = cell(failed);
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

// ------------------------------------------------------------------ limits

ExperimentResult run_limits(const ExperimentConfig& config, const FactorModel& model) {
  ExperimentResult result{config.kind, {}, std::nullopt, {}, 0.0};
  result.summary.header = {"grid_index", "n", "case", "b_n", "a_n", "c_index", "c_value", "alpha", "error"};
  const std::size_t width = result.summary.header.size();
  const LimitCase case_tag = resolve_case(config, model);
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    auto row = blank_row(width);
    row[0] = cell(std::uint64_t{g});
    row[1] = cell(config.grid[g]);
    row[2] = to_string(case_tag);
    guarded_row(row, width - 1, [&] {
      const auto norm = normalization(model, config.grid[g], case_tag);
      row[3] = cell(norm.b);
      row[4] = cell(norm.a);
      row[5] = cell(norm.c_index);
      row[6] = cell(norm.c_value);
      row[7] = cell(norm.alpha);
    });
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace

ExperimentKind parse_kind(std::string_view s) {
  if (s == "et-clt" || s == "simulate") return ExperimentKind::et_clt;
  if (s == "exact-oracle" || s == "exact") return ExperimentKind::exact_oracle;
  if (s == "walk") return ExperimentKind::walk;
  if (s == "stable-input") return ExperimentKind::stable_input;
  if (s == "poisson") return ExperimentKind::poisson;
  if (s == "verify-identity") return ExperimentKind::verify_identity;
  if (s == "limits") return ExperimentKind::limits;
  throw ValidationError("unknown experiment kind '" + std::string(s) + "'");
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::et_clt: return "et-clt";
    case ExperimentKind::exact_oracle: return "exact-oracle";
    case ExperimentKind::walk: return "walk";
    case ExperimentKind::stable_input: return "stable-input";
    case ExperimentKind::poisson: return "poisson";
    case ExperimentKind::verify_identity: return "verify-identity";
    case ExperimentKind::limits: return "limits";
  }
  return "?";
}

SamplerKind parse_sampler(std::string_view s) {
  if (s == "markov") return SamplerKind::markov;
  if (s == "thinning") return SamplerKind::thinning;
  if (s == "basic") return SamplerKind::basic;
  throw ValidationError("unknown sampler '" + std::string(s) + "'");
}

std::string to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::markov: return "markov";
    case SamplerKind::thinning: return "thinning";
    case SamplerKind::basic: return "basic";
  }
  return "?";
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (piece.empty()) throw ValidationError("grid: empty entry in '" + std::string(text) + "'");
    grid.push_back(parse_real("grid", piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return grid;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "kind") {
    kind = parse_kind(value);
  } else if (key == "model") {
    model_spec = std::string(value);
  } else if (key == "case") {
    case_tag = parse_limit_case(value);
  } else if (key == "grid") {
    grid = parse_grid(value);
  } else if (key == "reps" || key == "replicates") {
    replicates = parse_unsigned(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "detail") {
    detail = std::filesystem::path(std::string(value));
  } else if (key == "workers") {
    const auto w = parse_unsigned(key, value);
    if (w == 0 || w > 1024) throw ValidationError("workers must be in [1, 1024]");
    workers = static_cast<unsigned>(w);
  } else if (key == "beta") {
    beta = parse_real(key, value);
  } else if (key == "sampler") {
    sampler = parse_sampler(value);
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    config.set(t.substr(0, eq), t.substr(eq + 1));
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

void ExperimentConfig::validate() const {
  if (model_spec.empty()) throw ValidationError("model is required");
  const FactorModel model = FactorModel::parse(model_spec);
  if (replicates < 1) throw ValidationError("reps must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (grid.empty()) throw ValidationError("grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ValidationError("grid must be strictly increasing");
  for (const double v : grid)
    if (!std::isfinite(v)) throw ValidationError("grid values must be finite");

  const auto require_integers = [&](double lo, double hi, std::string_view what) {
    for (const double v : grid)
      if (!is_integral(v) || v < lo || v > hi)
        throw ValidationError(std::string(what) + " grid needs integers in [" + format_real(lo) + ", " +
                              format_real(hi) + "], got " + format_real(v));
  };
  const auto require_mu = [&] {
    if (!model.log_moments().mu_finite())
      throw ValidationError("model " + model.spec() + " has E|log W| = inf");
  };
  const auto check_sampler = [&] {
    const double top = grid.back();
    if (sampler == SamplerKind::markov && top > static_cast<double>(kMaxMarkovN))
      throw ValidationError(sampler_limit_message(sampler, kMaxMarkovN));
    if (sampler == SamplerKind::basic && top > static_cast<double>(kMaxBasicN))
      throw ValidationError(sampler_limit_message(sampler, kMaxBasicN));
  };
  const auto check_case = [&] {
    if (case_tag) {
      c_sequence_for(model, *case_tag);
    } else {
      default_case(model);
    }
  };

  switch (kind) {
    case ExperimentKind::et_clt:
      require_integers(1, 1e15, "et-clt");
      check_sampler();
      check_case();
      break;
    case ExperimentKind::exact_oracle:
      require_integers(1, static_cast<double>(ExactPartitionLaw::kMaxN), "exact-oracle");
      break;
    case ExperimentKind::walk:
      for (const double v : grid)
        if (!(v > 0.0)) throw ValidationError("walk grid needs x > 0");
      require_mu();
      check_case();
      break;
    case ExperimentKind::stable_input:
      require_integers(1, 1e12, "stable-input");
      if (case_tag && *case_tag != LimitCase::c) throw ValidationError("stable-input is defined for case c only");
      c_sequence_for(model, LimitCase::c);
      break;
    case ExperimentKind::poisson:
      for (const double v : grid)
        if (!(v > 1.0)) throw ValidationError("poisson grid needs t > 1");
      if (!(beta > 0.0 && beta < 0.5)) throw ValidationError("beta must lie in (0, 1/2)");
      require_mu();
      break;
    case ExperimentKind::verify_identity:
      require_integers(1, 1e15, "verify-identity");
      check_sampler();
      break;
    case ExperimentKind::limits:
      for (const double v : grid)
        if (!(v >= 1.0)) throw ValidationError("limits grid needs n >= 1");
      check_case();
      break;
  }
}

void Table::write(std::ostream& out) const { write_csv(out, header, rows); }

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write(out);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body) {
  if (count == 0) return;
  workers = std::max(1u, workers);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::uint64_t> next{0};
  // Every index runs even after a failure, so the rethrown error does not
  // depend on scheduling.
  const auto work = [&] {
    for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || count == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    const auto n = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ExperimentResult run(const ExperimentConfig& config) {
  config.validate();
  const FactorModel model = FactorModel::parse(config.model_spec);
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  switch (config.kind) {
    case ExperimentKind::et_clt: result = run_et_clt(config, model); break;
    case ExperimentKind::exact_oracle: result = run_exact_oracle(config, model); break;
    case ExperimentKind::walk: result = run_walk(config, model); break;
    case ExperimentKind::stable_input: result = run_stable_input(config, model); break;
    case ExperimentKind::poisson: result = run_poisson(config, model); break;
    case ExperimentKind::verify_identity: result = run_verify_identity(config, model); break;
    case ExperimentKind::limits: result = run_limits(config, model); break;
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult verify_identity(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::verify_identity;
  return run(c);
}

}  // namespace stickperm
