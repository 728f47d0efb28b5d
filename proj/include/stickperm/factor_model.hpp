#pragma once

// Law of the stick-breaking factor W in (0,1).
//
// Everything downstream consumes W through a small set of functionals: draws
// (also in log coordinates, where heavy-tailed |log W| would underflow W),
// the tails of |log W| and |log(1-W)|, the log-moments, and the mixed
// moments E[W^k (1-W)^m] that build the decrement matrix.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stickperm/random.hpp"

namespace stickperm {

struct BetaLaw {
  double a;
  double b;
};

/// W = exp(-V) with P{V > x} = x^(-alpha) for x >= 1.
struct ParetoLogLaw {
  double alpha;
};

/// Piecewise-linear density on a grid inside (0,1), zero outside the grid.
class DensityTable {
 public:
  /// Validates strict monotonicity, range, nonnegativity and unit mass
  /// (trapezoid rule, exact for this interpolant) within 1e-6, then rescales
  /// to mass exactly 1.
  static DensityTable from_points(std::vector<double> x, std::vector<double> f);

  /// Two-column CSV `x,f`; an optional header line is skipped.
  static DensityTable from_csv(const std::filesystem::path& path);

  double density(double w) const noexcept;
  double cdf(double w) const noexcept;
  double survival(double w) const noexcept;
  double quantile(double u) const noexcept;

  /// C(n,m) E[W^(n-m) (1-W)^m], exact for the piecewise-linear density.
  double binomial_moment(std::uint64_t n, std::uint64_t m) const;
  /// 1 - E[W^n].
  double one_minus_power_moment(std::uint64_t n) const;

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& f() const noexcept { return f_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
  std::vector<double> cumulative_;  // mass to the left of x_[i]
  std::string source_;
};

struct TabulatedLaw {
  std::shared_ptr<const DensityTable> table;
};

using FactorLaw = std::variant<BetaLaw, ParetoLogLaw, TabulatedLaw>;

/// Slowly varying factor restricted to l(x) = coef * (log x)^log_power.
struct SlowlyVarying {
  double coef = 1.0;
  double log_power = 0.0;

  double operator()(double x) const;
  bool is_constant() const noexcept { return log_power == 0.0; }
};

struct LightTail {};

/// P{|log W| > x} ~ x^(-alpha) l(x).
struct RegularlyVaryingTail {
  double alpha;
  SlowlyVarying ell;
};

using TailClass = std::variant<LightTail, RegularlyVaryingTail>;

/// Infinite entries are stored as +inf.
struct MomentSummary {
  double mu;      // E|log W|
  double sigma2;  // Var log W
  double nu;      // E|log(1-W)|

  bool mu_finite() const noexcept;
  bool sigma2_finite() const noexcept;
  bool nu_finite() const noexcept;
};

/// One draw of W together with accurate log-coordinates of W and 1-W.
struct FactorDraw {
  double w;            // may underflow to 0 for heavy |log W|
  double one_minus_w;  // 1 - W, computed without cancellation
  double xi;           // |log W|
  double eta;          // |log(1-W)|
};

class FactorModel {
 public:
  static FactorModel beta(double a, double b);
  static FactorModel pareto_log(double alpha);
  static FactorModel tabulated(DensityTable table);

  /// `beta:a,b` | `paretolog:alpha` | `table:<path>`.
  static FactorModel parse(std::string_view spec);

  const FactorLaw& law() const noexcept { return law_; }
  std::string spec() const;
  TailClass tail_class() const;

  /// The l in "int_0^x y^2 P{|log W| in dy} ~ l(x)" when sigma2 = inf and the
  /// truncated second moment is slowly varying (ParetoLog(2): 2 log x).
  std::optional<SlowlyVarying> truncated_second_moment() const;

  const MomentSummary& log_moments() const noexcept { return moments_; }

  /// W in (0,1); draws that round to exactly 0 or 1 are redrawn.
  double sample(Generator& gen) const;
  FactorDraw draw(Generator& gen) const;

  /// P{|log(1-W)| > x}.
  double eta_tail(double x) const;
  /// P{|log W| > x}.
  double xi_tail(double x) const;
  /// int_0^y eta_tail(z) dz.
  double r_star(double y) const;
  /// int_0^y r_star(z) dz = int_0^y (y - z) eta_tail(z) dz.
  double r_star_integral(double y) const;

  /// log of C(n,m) E[W^(n-m) (1-W)^m].
  double log_binomial_moment(std::uint64_t n, std::uint64_t m) const;
  /// log of 1 - E[W^n].
  double log_one_minus_power_moment(std::uint64_t n) const;

 private:
  explicit FactorModel(FactorLaw law);
  MomentSummary compute_moments() const;
  std::vector<double> eta_breakpoints(double y) const;

  FactorLaw law_;
  MomentSummary moments_{};
};

// Free-function spellings of the model operations.
inline double sample_factor(const FactorModel& model, Generator& gen) { return model.sample(gen); }
inline const MomentSummary& log_moments(const FactorModel& model) { return model.log_moments(); }
inline double eta_tail(const FactorModel& model, double x) { return model.eta_tail(x); }
inline double xi_tail(const FactorModel& model, double x) { return model.xi_tail(x); }
inline double r_star(const FactorModel& model, double y) { return model.r_star(y); }

}  // namespace stickperm
