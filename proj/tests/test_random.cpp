#include <doctest.h>

#include <cmath>
#include <vector>

#include "stickperm/random.hpp"

using namespace stickperm;

namespace {

struct Moments {
  double mean, var;
};

template <class Draw>
Moments moments(std::size_t count, Draw draw) {
  long double s = 0, ss = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const long double x = draw();
    s += x;
    ss += x * x;
  }
  const long double m = s / count;
  return {static_cast<double>(m), static_cast<double>((ss - count * m * m) / (count - 1))};
}

}  // namespace

TEST_SUITE("random") {
  TEST_CASE("seed derivation depends only on the triple") {
    CHECK(split_seed(7, 2, 3) == split_seed(7, 2, 3));
    CHECK(split_seed(7, 2, 3) != split_seed(7, 3, 2));
    CHECK(split_seed(7, 0, 0) != split_seed(8, 0, 0));
    Generator a = make_generator(1, 2, 3), b = make_generator(1, 2, 3);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
  }

  TEST_CASE("uniform_open stays inside (0,1)") {
    Generator gen = make_generator(5, 0, 0);
    for (int i = 0; i < 100000; ++i) {
      const double u = uniform_open(gen);
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
    }
  }

  TEST_CASE("normal and exponential moments") {
    Generator gen = make_generator(9, 0, 0);
    const auto n = moments(200000, [&] { return standard_normal(gen); });
    CHECK(std::abs(n.mean) < 4.0 * std::sqrt(1.0 / 200000));
    CHECK(n.var == doctest::Approx(1.0).epsilon(0.02));
    const auto e = moments(200000, [&] { return standard_exponential(gen); });
    CHECK(e.mean == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("gamma moments across the shape < 1 boost") {
    Generator gen = make_generator(11, 0, 0);
    for (const double shape : {0.3, 1.0, 4.5}) {
      const auto m = moments(200000, [&] { return sample_gamma(gen, shape); });
      CHECK(std::abs(m.mean - shape) < 4.0 * std::sqrt(shape / 200000));
      CHECK(m.var == doctest::Approx(shape).epsilon(0.03));
    }
  }

  TEST_CASE("poisson moments in both regimes") {
    Generator gen = make_generator(13, 0, 0);
    CHECK(sample_poisson(gen, 0.0) == 0);
    for (const double mean : {0.7, 12.0, 29.9, 30.0, 250.0, 1e6}) {
      const std::size_t count = 100000;
      const auto m = moments(count, [&] { return static_cast<double>(sample_poisson(gen, mean)); });
      CAPTURE(mean);
      CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(mean / count));
      CHECK(m.var == doctest::Approx(mean).epsilon(0.03));
    }
  }

  TEST_CASE("binomial moments in both regimes and edge cases") {
    Generator gen = make_generator(17, 0, 0);
    CHECK(sample_binomial(gen, 0, 0.3) == 0);
    CHECK(sample_binomial(gen, 10, 0.0) == 0);
    CHECK(sample_binomial(gen, 10, 1.0) == 10);
    struct Case {
      std::uint64_t n;
      double p;
    };
    for (const Case c : {Case{5, 0.5}, Case{40, 0.1}, Case{1000, 0.3}, Case{1000, 0.97}, Case{100000000, 0.42}}) {
      const std::size_t count = 100000;
      const double mean = c.n * c.p, var = c.n * c.p * (1 - c.p);
      const auto m = moments(count, [&] { return static_cast<double>(sample_binomial(gen, c.n, c.p)); });
      CAPTURE(c.n);
      CAPTURE(c.p);
      CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(var / count));
      CHECK(m.var == doctest::Approx(var).epsilon(0.03));
    }
  }

  TEST_CASE("binomial never exceeds its trials") {
    Generator gen = make_generator(19, 0, 0);
    for (int i = 0; i < 20000; ++i) {
      const auto k = sample_binomial(gen, 25, 0.999);
      REQUIRE(k <= 25);
    }
  }
}
