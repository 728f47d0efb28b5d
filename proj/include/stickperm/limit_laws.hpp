#pragma once

// Normalizing sequences for log O_n and log T_n and the alpha-stable limit.
// Centering b_n = mu^-1 (log^2 n / 2 - int_0^{log n} r*(z) dz), where r* is
// the integrated tail of |log(1-W)|. Scalings by moment regime:
//   a: a_n = sqrt(sigma^2 log^3 n / (3 mu^3))
//   b: a_n = (3 mu^3)^(-1/2) c_{floor(log n)} log n,  m l(c_m) / c_m^2 = 1
//   c: a_n = ((alpha+1) mu^(alpha+1))^(-1/alpha) c_{floor(log n)} log n,
//      m l(c_m) / c_m^alpha = 1

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stickperm/factor_model.hpp"

namespace stickperm {

enum class LimitCase { a, b, c };

LimitCase parse_limit_case(std::string_view s);
std::string to_string(LimitCase c);

/// The c-sequence of regimes b and c: c_m solves m l(c)/c^alpha = 1.
struct CSequence {
  double alpha;
  SlowlyVarying ell;
};

struct LimitNormalization {
  LimitCase case_tag;
  double b;
  double a;
  double alpha;              // NaN outside regime c
  std::uint64_t c_index;     // floor(log n); 0 in regime a
  double c_value;            // NaN in regime a
};

/// Picks the regime implied by the model's moments: a if sigma^2 < inf, b if
/// the truncated second moment is slowly varying, c for tail index in (1,2).
LimitCase default_case(const FactorModel& model);

/// Throws ValidationError when the model does not satisfy the regime's
/// moment conditions. Returns the c-sequence descriptor (unused in case a).
CSequence c_sequence_for(const FactorModel& model, LimitCase case_tag);

/// b_n for real n >= 1.
double centering_b(const FactorModel& model, double n);
double scaling_a(const FactorModel& model, double n, LimitCase case_tag);
LimitNormalization normalization(const FactorModel& model, double n, LimitCase case_tag);

/// Root of m l(c) / c^alpha = 1 on the branch where c grows with m; residual
/// below 1e-10. Throws DomainError when m <= 0 or no root exists.
double solve_c(double alpha, const SlowlyVarying& ell, double m);

/// Scaling c(x) of rho(x) - x/mu for the walk with increments |log W|:
/// a: sqrt(sigma^2 x / mu^3); b: mu^(-3/2) c_{floor x}; c: mu^(-1-1/alpha) c_{floor x}.
double walk_scale(const FactorModel& model, double x, LimitCase case_tag);

/// Gamma(1 - alpha) through the reflection formula.
double stable_gamma_factor(double alpha);

/// exp{-|u|^alpha Gamma(1-alpha) (cos(pi alpha/2) + i sin(pi alpha/2) sgn u)}.
std::complex<double> stable_cf(double alpha, double u);

/// The law scale * Z, Z with characteristic function stable_cf(alpha, .).
/// The CDF comes from the Gil-Pelaez inversion
///   F(x) = 1/2 + (1/pi) int_0^U e^{-A u^alpha} sin(u x + B u^alpha) / u du
/// with U chosen so that e^{-A U^alpha} < 1e-8.
class StableLaw {
 public:
  explicit StableLaw(double alpha, double scale = 1.0);

  double alpha() const noexcept { return alpha_; }
  double scale() const noexcept { return scale_; }
  std::complex<double> cf(double u) const { return stable_cf(alpha_, scale_ * u); }
  double cdf(double x) const;

 private:
  struct Nodes {
    std::vector<double> u, weight, phase;  // weight includes e^{-A u^alpha} / u
  };
  Nodes build_nodes(double panel_width) const;
  double evaluate(const Nodes& nodes, double z) const;

  double alpha_;
  double scale_;
  double a_coef_;
  double b_coef_;
  double cutoff_;
  Nodes cached_;
  double cached_reach_;
};

/// The limit of the integrated walk: (alpha + 1)^(-1/alpha) Z.
StableLaw integrated_stable_law(double alpha);

}  // namespace stickperm
