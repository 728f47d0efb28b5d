#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

namespace stickperm {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Thread-safe log-gamma (glibc's lgamma writes the global signgam).
double log_gamma(double x) noexcept;

double log_choose(std::uint64_t n, std::uint64_t k) noexcept;

/// log(1 - exp(x)) for x < 0 without cancellation.
double log1mexp(double x) noexcept;

/// Adaptive Gauss-Kronrod on [a,b] (b may be +inf). Throws NumericError when
/// the error estimate exceeds rel_tol * max(L1 norm, abs_floor).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, std::string_view what = "integral",
                 double abs_floor = 0.0);

/// Same, summed over consecutive panels [breaks[i], breaks[i+1]].
double integrate_panels(const std::function<double(double)>& f,
                        std::span<const double> breaks, double rel_tol = 1e-12,
                        std::string_view what = "integral");

}  // namespace stickperm
