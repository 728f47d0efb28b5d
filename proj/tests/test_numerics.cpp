#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

using namespace stickperm;

TEST_SUITE("numerics") {
  TEST_CASE("compensated sum keeps small terms") {
    CompensatedSum s;
    s += 1e16;
    for (int i = 0; i < 1000; ++i) s += 1.0;
    s += -1e16;
    CHECK(s.value() == 1000.0);
  }

  TEST_CASE("log_choose and log1mexp") {
    CHECK(std::exp(log_choose(10, 3)) == doctest::Approx(120.0));
    CHECK(log_choose(7, 0) == 0.0);
    CHECK(log1mexp(-1e-20) == doctest::Approx(std::log(1e-20)));
    CHECK(log1mexp(-50.0) == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
    CHECK(log1mexp(std::log(0.5)) == doctest::Approx(std::log(0.5)));
  }

  TEST_CASE("adaptive integration") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const double tail = integrate([](double x) { return std::exp(-x); }, 0.0, std::numeric_limits<double>::infinity());
    CHECK(tail == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> breaks{0.0, 0.5, 1.0};
    CHECK(integrate_panels([](double x) { return std::abs(x - 0.5); }, breaks) == doctest::Approx(0.25).epsilon(1e-14));
  }
}
