#pragma once

// Perturbed random walk T_k = S_{k-1} + eta_k, S_k = xi_1 + ... + xi_k, with
// (xi, eta) = (|log W|, |log(1-W)|) taken from the same draw of W, and the
// poissonization helpers used to pass from log T_{pi_t} to log T_n.

#include <cstdint>
#include <span>
#include <vector>

#include "stickperm/factor_model.hpp"
#include "stickperm/random.hpp"

namespace stickperm {

class WalkPath {
 public:
  /// Throws DomainError unless every xi > 0, eta >= 0 and S_K > x_max.
  static WalkPath from_increments(std::vector<double> xi, std::vector<double> eta, double x_max);

  std::size_t steps() const noexcept { return xi_.size(); }
  double horizon() const noexcept { return x_max_; }
  std::span<const double> xi() const noexcept { return xi_; }
  std::span<const double> eta() const noexcept { return eta_; }
  /// S_0 = 0, ..., S_K.
  std::span<const double> partial_sums() const noexcept { return s_; }
  /// T_1, ..., T_K in index order.
  std::span<const double> perturbed_points() const noexcept { return t_; }

  /// rho(x) = #{k >= 0 : S_k <= x}.
  std::uint64_t rho_at(double x) const;
  /// N(x) = #{k >= 1 : T_k <= x}.
  std::uint64_t n_at(double x) const;
  /// M(x) = sum_{k >= 0} F(x - S_k), F the CDF of eta.
  double m_at(double x, const FactorModel& model) const;

  /// int_0^x (rho(y) - y/mu) dy, exact between events.
  double integral_J(double x, double mu) const;
  double integral_J(double x, const FactorModel& model) const;
  /// int_0^x (N(y) - (y - r*(y))/mu) dy, with r2 = int_0^x r*(z) dz.
  double integral_I(double x, double mu, double r2) const;
  double integral_I(double x, const FactorModel& model) const;

 private:
  WalkPath() = default;
  void check(double x) const;

  std::vector<double> xi_, eta_, s_, t_, t_sorted_;
  double x_max_ = 0.0;
};

/// Steps until S_K > x_max; every T_k <= x_max is then present because
/// T_k >= S_{k-1}.
WalkPath simulate_path(const FactorModel& model, double x_max, Generator& gen);

struct WalkSnapshot {
  std::uint64_t rho;
  std::uint64_t n;
  double m;
  double i;  // unnormalized
  double j;  // unnormalized
};

/// All walk functionals at x; throws std::logic_error if N(x) > rho(x).
WalkSnapshot evaluate_walk(const WalkPath& path, double x, const FactorModel& model);

/// f_j(t) = E (log+ pi_t)^j = e^-t sum_{k>=2} log^j k t^k / k!, j in {1,2}.
double f_moment(int j, double t);
/// Var(log+ pi_t) = f_2 - f_1^2.
double h_var(double t);

/// log T of a thinning-sampled partition of Poisson(t) size; 0 when empty.
double sample_V(const FactorModel& model, double t, Generator& gen);

/// q(t) = exp(-t (eps + (1 - eps) log(1 - eps))), eps = t^-beta; bounds
/// P{pi_t <= (1 - eps) t}. Needs t > 1 and beta in (0, 1/2).
double poisson_deviation_bound(double t, double beta);
/// log q(t), finite where q(t) underflows.
double poisson_deviation_log_bound(double t, double beta);

/// p(t) = log(1 - eps) P{pi_t > (1 - eps) t} - q(t) log t, a lower bound
/// for f_1(t) - log t.
double poisson_deviation_lower(double t, double beta);

}  // namespace stickperm
