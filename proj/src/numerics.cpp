#include "stickperm/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>
#include <string>

#include "stickperm/errors.hpp"

namespace stickperm {

double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_choose(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return -std::numeric_limits<double>::infinity();
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return log_gamma(nd + 1.0) - log_gamma(kd + 1.0) - log_gamma(nd - kd + 1.0);
}

double log1mexp(double x) noexcept {
  // Mächler's switch point -log 2.
  return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 std::string_view what, double abs_floor) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, rel_tol, what, abs_floor);
  // Infinite limits map onto a finite interval first.
  if (std::isinf(a) && std::isinf(b)) {
    return integrate(
        [&](double t) {
          const double s = 1.0 - t * t;
          return f(t / s) * (1.0 + t * t) / (s * s);
        },
        -1.0, 1.0, rel_tol, what, abs_floor);
  }
  if (std::isinf(b)) {
    return integrate(
        [&](double t) {
          const double s = 1.0 - t;
          return f(a + t / s) / (s * s);
        },
        0.0, 1.0, rel_tol, what, abs_floor);
  }
  if (std::isinf(a)) {
    return integrate(
        [&](double t) {
          const double s = 1.0 - t;
          return f(b - t / s) / (s * s);
        },
        0.0, 1.0, rel_tol, what, abs_floor);
  }
  // Globally adaptive: always bisect the piece with the largest error.
  // Boost's own recursion compares an unscaled panel error against a scaled
  // target, so narrow panels never settle.
  struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  const auto rule = [&](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0, 0.0};
    p.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    // Boost 1.74 reports a single panel's error on the reference interval
    // [-1, 1] without the half-width factor.
    p.error *= 0.5 * (hi - lo);
    if (!std::isfinite(p.value) || !std::isfinite(p.error)) p.error = std::numeric_limits<double>::infinity();
    return p;
  };
  std::vector<Piece> heap{rule(a, b)};
  double value = heap[0].value, error = heap[0].error, l1 = heap[0].l1;
  constexpr std::size_t kMaxPieces = 4000;
  while (true) {
    if (error <= rel_tol * std::max(l1, abs_floor) + std::numeric_limits<double>::min()) return value;
    if (heap.size() >= kMaxPieces) break;
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.back() = rule(worst.a, mid);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(rule(mid, worst.b));
    std::push_heap(heap.begin(), heap.end());
    // Re-sum rather than update so cancellation cannot accumulate.
    CompensatedSum v, e, m;
    for (const Piece& p : heap) v += p.value, e += p.error, m += p.l1;
    value = v.value(), error = e.value(), l1 = m.value();
  }
  // Roundoff can keep the estimate just above target; accept modest slack.
  if (std::isfinite(value) && error <= 50.0 * rel_tol * std::max(l1, abs_floor)) return value;
  throw NumericError(std::string(what) + ": quadrature did not converge", error);
}

double integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                        double rel_tol, std::string_view what) {
  // Tolerance is relative to the whole integral: a coarse first pass sizes
  // it, so panels carrying negligible mass are not chased to roundoff.
  double total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    double error = 0.0, l1 = 0.0;
    boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, breaks[i], breaks[i + 1], 0, 0.0, &error, &l1);
    if (std::isfinite(l1)) total_l1 += l1;
  }
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) total += integrate(f, breaks[i], breaks[i + 1], rel_tol, what, total_l1);
  }
  return total.value();
}

}  // namespace stickperm
