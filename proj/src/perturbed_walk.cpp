#include "stickperm/perturbed_walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "stickperm/cycle_stats.hpp"
#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"
#include "stickperm/samplers.hpp"

namespace stickperm {

WalkPath WalkPath::from_increments(std::vector<double> xi, std::vector<double> eta, double x_max) {
  if (xi.size() != eta.size()) throw ValidationError("xi and eta must have equal length");
  if (xi.empty()) throw DomainError("walk path needs at least one step");
  if (!(x_max >= 0.0)) throw DomainError("walk horizon must be >= 0");
  WalkPath p;
  p.s_.reserve(xi.size() + 1);
  p.t_.reserve(xi.size());
  p.s_.push_back(0.0);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (!(xi[k] > 0.0) || !std::isfinite(xi[k])) throw DomainError("walk increments must be positive");
    if (!(eta[k] >= 0.0)) throw DomainError("walk perturbations must be >= 0");
    p.t_.push_back(p.s_.back() + eta[k]);
    p.s_.push_back(p.s_.back() + xi[k]);
  }
  if (!(p.s_.back() > x_max)) throw DomainError("walk path does not pass its horizon");
  p.xi_ = std::move(xi);
  p.eta_ = std::move(eta);
  p.t_sorted_ = p.t_;
  std::sort(p.t_sorted_.begin(), p.t_sorted_.end());
  p.x_max_ = x_max;
  return p;
}

WalkPath simulate_path(const FactorModel& model, double x_max, Generator& gen) {
  if (!(x_max >= 0.0)) throw DomainError("walk horizon must be >= 0");
  std::vector<double> xi, eta;
  double s = 0.0;
  do {
    const FactorDraw d = model.draw(gen);
    xi.push_back(d.xi);
    eta.push_back(d.eta);
    s += d.xi;
  } while (s <= x_max);
  return WalkPath::from_increments(std::move(xi), std::move(eta), x_max);
}

void WalkPath::check(double x) const {
  if (!(x >= 0.0) || x > x_max_) throw DomainError("evaluation point outside [0, horizon]");
}

std::uint64_t WalkPath::rho_at(double x) const {
  check(x);
  return static_cast<std::uint64_t>(std::upper_bound(s_.begin(), s_.end(), x) - s_.begin());
}

std::uint64_t WalkPath::n_at(double x) const {
  check(x);
  return static_cast<std::uint64_t>(std::upper_bound(t_sorted_.begin(), t_sorted_.end(), x) - t_sorted_.begin());
}

double WalkPath::m_at(double x, const FactorModel& model) const {
  check(x);
  CompensatedSum m;
  for (const double s : s_) {
    if (s > x) break;
    m += 1.0 - model.eta_tail(x - s);
  }
  return m.value();
}

double WalkPath::integral_J(double x, double mu) const {
  check(x);
  // int_0^x rho = sum_{S_k <= x} (x - S_k)
  CompensatedSum area;
  for (const double s : s_) {
    if (s > x) break;
    area += x - s;
  }
  area += -x * x / (2.0 * mu);
  return area.value();
}

double WalkPath::integral_J(double x, const FactorModel& model) const {
  return integral_J(x, model.log_moments().mu);
}

double WalkPath::integral_I(double x, double mu, double r2) const {
  check(x);
  CompensatedSum area;
  for (const double t : t_sorted_) {
    if (t > x) break;
    area += x - t;
  }
  area += -(0.5 * x * x - r2) / mu;
  return area.value();
}

double WalkPath::integral_I(double x, const FactorModel& model) const {
  return integral_I(x, model.log_moments().mu, model.r_star_integral(x));
}

WalkSnapshot evaluate_walk(const WalkPath& path, double x, const FactorModel& model) {
  WalkSnapshot snap{path.rho_at(x), path.n_at(x), path.m_at(x, model), path.integral_I(x, model),
                    path.integral_J(x, model)};
  if (snap.n > snap.rho) throw std::logic_error("N(x) > rho(x) on a walk path");
  return snap;
}

double f_moment(int j, double t) {
  if (j != 1 && j != 2) throw DomainError("f_moment needs j in {1, 2}");
  if (!(t >= 0.0)) throw DomainError("f_moment needs t >= 0");
  if (t == 0.0) return 0.0;
  const double log_t = std::log(t);
  const auto term = [&](std::uint64_t k) {
    const double kk = static_cast<double>(k);
    const double lk = std::log(kk);
    return std::exp(-t + kk * log_t - log_gamma(kk + 1.0)) * (j == 1 ? lk : lk * lk);
  };
  const std::uint64_t start = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::floor(t)));
  CompensatedSum sum;
  for (std::uint64_t k = start;; ++k) {
    const double v = term(k);
    sum += v;
    if (static_cast<double>(k) > t && v <= 1e-17 * sum.value()) break;
  }
  for (std::uint64_t k = start; k-- > 2;) {
    const double v = term(k);
    sum += v;
    if (v <= 1e-17 * sum.value()) break;
  }
  return sum.value();
}

double h_var(double t) {
  const double f1 = f_moment(1, t);
  return f_moment(2, t) - f1 * f1;
}

double sample_V(const FactorModel& model, double t, Generator& gen) {
  if (!(t >= 0.0)) throw DomainError("poissonization needs t >= 0");
  const std::uint64_t balls = sample_poisson(gen, t);
  if (balls == 0) return 0.0;
  return log_T(sample_partition_thinning(model, balls, gen));
}

namespace {

double deviation_eps(double t, double beta) {
  if (!(t > 1.0)) throw DomainError("deviation bound needs t > 1");
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("deviation bound needs beta in (0, 1/2)");
  return std::pow(t, -beta);
}

}  // namespace

double poisson_deviation_log_bound(double t, double beta) {
  const double eps = deviation_eps(t, beta);
  return -t * (eps + (1.0 - eps) * std::log1p(-eps));
}

double poisson_deviation_bound(double t, double beta) { return std::exp(poisson_deviation_log_bound(t, beta)); }

double poisson_deviation_lower(double t, double beta) {
  const double eps = deviation_eps(t, beta);
  const double k = std::floor((1.0 - eps) * t);
  // P{pi_t > k} = P(k + 1, t), the regularized lower incomplete gamma.
  const double upper = boost::math::gamma_p(k + 1.0, t);
  return std::log1p(-eps) * upper - poisson_deviation_bound(t, beta) * std::log(t);
}

}  // namespace stickperm
