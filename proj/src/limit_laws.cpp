#include "stickperm/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stickperm/errors.hpp"

namespace stickperm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t floor_log(double n) {
  const double l = std::log(n);
  // exp(10.0) must map to index 10 despite rounding in log.
  return static_cast<std::uint64_t>(std::floor(l + 1e-12 * std::max(1.0, l)));
}

void require_finite_mu(const FactorModel& model) {
  if (!model.log_moments().mu_finite())
    throw ValidationError("model " + model.spec() + " has E|log W| = inf; no centering exists");
}

}  // namespace

LimitCase parse_limit_case(std::string_view s) {
  if (s == "a") return LimitCase::a;
  if (s == "b") return LimitCase::b;
  if (s == "c") return LimitCase::c;
  throw ValidationError("case must be a, b or c, got '" + std::string(s) + "'");
}

std::string to_string(LimitCase c) {
  switch (c) {
    case LimitCase::a: return "a";
    case LimitCase::b: return "b";
    case LimitCase::c: return "c";
  }
  return "?";
}

LimitCase default_case(const FactorModel& model) {
  const auto& m = model.log_moments();
  if (m.sigma2_finite()) return LimitCase::a;
  if (model.truncated_second_moment()) return LimitCase::b;
  const TailClass tail = model.tail_class();
  if (const auto* rv = std::get_if<RegularlyVaryingTail>(&tail); rv && rv->alpha > 1.0 && rv->alpha < 2.0)
    return LimitCase::c;
  throw ValidationError("model " + model.spec() + " falls in none of the regimes a, b, c");
}

CSequence c_sequence_for(const FactorModel& model, LimitCase case_tag) {
  require_finite_mu(model);
  const auto& m = model.log_moments();
  switch (case_tag) {
    case LimitCase::a:
      if (!m.sigma2_finite())
        throw ValidationError("case a needs Var log W < inf, which fails for " + model.spec());
      return {2.0, SlowlyVarying{}};
    case LimitCase::b: {
      const auto ell = model.truncated_second_moment();
      if (m.sigma2_finite() || !ell)
        throw ValidationError("case b needs Var log W = inf with slowly varying truncated second moment; " +
                              model.spec() + " does not qualify");
      return {2.0, *ell};
    }
    case LimitCase::c: {
      const TailClass tail = model.tail_class();
      const auto* rv = std::get_if<RegularlyVaryingTail>(&tail);
      if (!rv || !(rv->alpha > 1.0 && rv->alpha < 2.0))
        throw ValidationError("case c needs a tail index in (1,2); " + model.spec() + " does not qualify");
      return {rv->alpha, rv->ell};
    }
  }
  throw ValidationError("unknown case");
}

double centering_b(const FactorModel& model, double n) {
  if (!(n >= 1.0)) throw DomainError("centering needs n >= 1");
  require_finite_mu(model);
  const double l = std::log(n);
  if (l == 0.0) return 0.0;
  return (0.5 * l * l - model.r_star_integral(l)) / model.log_moments().mu;
}

double solve_c(double alpha, const SlowlyVarying& ell, double m) {
  if (!(m > 0.0)) throw DomainError("c-sequence needs m > 0");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("c-sequence needs alpha in (1,2]");
  if (!(ell.coef > 0.0)) throw DomainError("slowly varying factor must be positive");
  const double base = std::log(m) + std::log(ell.coef);
  if (ell.is_constant()) return std::exp(base / alpha);
  // In y = log c: g(y) = base + p log y - alpha y,
  // unimodal with peak at y = p / alpha. Take the root right of the peak.
  const double p = ell.log_power;
  const auto g = [&](double y) { return base + p * std::log(y) - alpha * y; };
  double lo = p > 0.0 ? p / alpha : std::numeric_limits<double>::min();
  if (g(lo) < 0.0) throw DomainError("m l(c) / c^alpha = 1 has no root for m = " + std::to_string(m));
  double hi = std::max(2.0 * lo, 1.0);
  while (g(hi) >= 0.0) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  const double c = std::exp(0.5 * (lo + hi));
  const double residual = std::abs(m * ell(c) / std::pow(c, alpha) - 1.0);
  if (!(residual < 1e-10)) throw NumericError("c-sequence bisection did not converge", residual);
  return c;
}

double scaling_a(const FactorModel& model, double n, LimitCase case_tag) {
  if (!(n >= 1.0)) throw DomainError("scaling needs n >= 1");
  const CSequence seq = c_sequence_for(model, case_tag);
  const auto& m = model.log_moments();
  const double l = std::log(n);
  switch (case_tag) {
    case LimitCase::a:
      return std::sqrt(m.sigma2 * l * l * l / (3.0 * m.mu * m.mu * m.mu));
    case LimitCase::b: {
      const double c = solve_c(seq.alpha, seq.ell, static_cast<double>(floor_log(n)));
      return c * l / std::sqrt(3.0 * m.mu * m.mu * m.mu);
    }
    case LimitCase::c: {
      const double c = solve_c(seq.alpha, seq.ell, static_cast<double>(floor_log(n)));
      return std::pow((seq.alpha + 1.0) * std::pow(m.mu, seq.alpha + 1.0), -1.0 / seq.alpha) * c * l;
    }
  }
  throw ValidationError("unknown case");
}

LimitNormalization normalization(const FactorModel& model, double n, LimitCase case_tag) {
  LimitNormalization out{case_tag, centering_b(model, n), scaling_a(model, n, case_tag), kNaN, 0, kNaN};
  if (case_tag != LimitCase::a) {
    const CSequence seq = c_sequence_for(model, case_tag);
    out.c_index = floor_log(n);
    out.c_value = solve_c(seq.alpha, seq.ell, static_cast<double>(out.c_index));
    if (case_tag == LimitCase::c) out.alpha = seq.alpha;
  }
  return out;
}

double walk_scale(const FactorModel& model, double x, LimitCase case_tag) {
  if (!(x >= 0.0)) throw DomainError("walk scale needs x >= 0");
  const CSequence seq = c_sequence_for(model, case_tag);
  const auto& m = model.log_moments();
  switch (case_tag) {
    case LimitCase::a:
      return std::sqrt(m.sigma2 * x / (m.mu * m.mu * m.mu));
    case LimitCase::b:
      return std::pow(m.mu, -1.5) * solve_c(seq.alpha, seq.ell, std::floor(x));
    case LimitCase::c:
      return std::pow(m.mu, -1.0 - 1.0 / seq.alpha) * solve_c(seq.alpha, seq.ell, std::floor(x));
  }
  throw ValidationError("unknown case");
}

double stable_gamma_factor(double alpha) {
  // Gamma(1-a) Gamma(a) = pi / sin(pi a)
  return std::numbers::pi / (std::sin(std::numbers::pi * alpha) * boost::math::tgamma(alpha));
}

std::complex<double> stable_cf(double alpha, double u) {
  if (u == 0.0) return {1.0, 0.0};
  const double g = stable_gamma_factor(alpha);
  const double ua = std::pow(std::abs(u), alpha);
  const double re = ua * g * std::cos(std::numbers::pi * alpha / 2.0);
  const double im = ua * g * std::sin(std::numbers::pi * alpha / 2.0) * (u > 0 ? 1.0 : -1.0);
  return std::exp(std::complex<double>(-re, -im));
}

StableLaw::StableLaw(double alpha, double scale) : alpha_(alpha), scale_(scale) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("stable law needs alpha in (1,2)");
  if (!(scale > 0.0)) throw DomainError("stable law needs a positive scale");
  const double g = stable_gamma_factor(alpha);
  a_coef_ = g * std::cos(std::numbers::pi * alpha / 2.0);
  b_coef_ = g * std::sin(std::numbers::pi * alpha / 2.0);
  if (!(a_coef_ > 0.0)) throw NumericError("stable characteristic exponent has no damping", a_coef_);
  cutoff_ = std::pow(std::log(1e8) / a_coef_, 1.0 / alpha);
  cached_reach_ = 200.0;
  cached_ = build_nodes(6.0 / cached_reach_);
}

StableLaw::Nodes StableLaw::build_nodes(double panel_width) const {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  Nodes nodes;
  const auto add_panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (const double sign : {-1.0, 1.0}) {
        const double u = mid + sign * half * x[i];
        const double ua = std::pow(u, alpha_);
        nodes.u.push_back(u);
        nodes.weight.push_back(half * w[i] * std::exp(-a_coef_ * ua) / u);
        nodes.phase.push_back(b_coef_ * ua);
      }
    }
  };
  const double first = std::min(panel_width, cutoff_);
  // The integrand behaves like z + B u^(alpha-1) near 0; geometric panels
  // resolve the fractional power.
  double hi = first;
  for (int k = 0; k < 40; ++k) {
    add_panel(0.5 * hi, hi);
    hi *= 0.5;
  }
  add_panel(0.0, hi);
  const auto panels = static_cast<std::size_t>(std::ceil((cutoff_ - first) / panel_width));
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = first + static_cast<double>(k) * panel_width;
    add_panel(lo, std::min(cutoff_, lo + panel_width));
  }
  return nodes;
}

double StableLaw::evaluate(const Nodes& nodes, double z) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.u.size(); ++i) s += nodes.weight[i] * std::sin(nodes.u[i] * z + nodes.phase[i]);
  const double f = 0.5 + s / std::numbers::pi;
  return std::clamp(f, 0.0, 1.0);
}

double StableLaw::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("stable cdf of NaN");
  const double z = x / scale_;
  // Beyond this the remaining mass is far below the 1e-8 quadrature error.
  if (z > 1e7) return 1.0;
  if (z < -1e7) return 0.0;
  if (std::abs(z) <= cached_reach_) return evaluate(cached_, z);
  return evaluate(build_nodes(6.0 / std::abs(z)), z);
}

StableLaw integrated_stable_law(double alpha) {
  return StableLaw(alpha, std::pow(alpha + 1.0, -1.0 / alpha));
}

}  // namespace stickperm
