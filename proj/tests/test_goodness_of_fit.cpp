#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stickperm/errors.hpp"
#include "stickperm/goodness_of_fit.hpp"
#include "stickperm/limit_laws.hpp"
#include "stickperm/random.hpp"

using namespace stickperm;

TEST_SUITE("goodness_of_fit") {
  TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-5));
    CHECK(normal_cdf(-40) >= 0.0);
  }

  TEST_CASE("ks statistic") {
    const std::vector<double> one{0.5};
    // ECDF jumps 0 -> 1 at 0.5 against the uniform CDF: sup gap 0.5.
    CHECK(ks_statistic(one, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
    const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK(ks_statistic(grid, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.1));
    const std::vector<double> s{3.0, -1.0, 2.5, 2.5, 7.0};
    CHECK(ks_two_sample(s, s) == 0.0);
    const std::vector<double> shifted{13.0, 9.0, 12.5, 12.5, 17.0};
    CHECK(ks_two_sample(s, shifted) == 1.0);

    Generator gen = make_generator(51, 0, 0);
    std::vector<double> z(20000);
    for (auto& x : z) x = standard_normal(gen);
    CHECK(ks_statistic(z, normal_cdf) < 1.36 / std::sqrt(20000.0));
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, normal_cdf), DomainError);
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, s), DomainError);
  }

  TEST_CASE("chi-square") {
    const std::vector<double> obs{10, 20, 30}, exp{10, 20, 30};
    const auto perfect = chi_square(obs, exp);
    CHECK(perfect.statistic == 0.0);
    CHECK(perfect.dof == 2);
    CHECK(perfect.p_value == doctest::Approx(1.0));

    const std::vector<double> o2{30, 10}, e2{20, 20};
    const auto r = chi_square(o2, e2);
    CHECK(r.statistic == doctest::Approx(10.0));
    CHECK(r.dof == 1);
    CHECK(r.p_value == doctest::Approx(0.0015654).epsilon(1e-4));

    // Two small cells pool into one of expected 6.
    const std::vector<double> o3{50, 3, 1, 46}, e3{47, 3, 3, 47};
    const auto pooled = chi_square(o3, e3);
    CHECK(pooled.bins == 3);
    CHECK(pooled.statistic == doctest::Approx(9.0 / 47 + 4.0 / 6 + 1.0 / 47));

    const auto same = chi_square_two_sample(obs, obs);
    CHECK(same.statistic == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));
    const std::vector<double> other{30, 20, 10};
    CHECK(chi_square_two_sample(obs, other).p_value < 0.01);
    CHECK_THROWS(chi_square(obs, e2));
  }

  TEST_CASE("empirical characteristic function") {
    const std::vector<double> zero{0.0, 0.0};
    CHECK(empirical_cf(zero, 3.0) == std::complex<double>(1.0, 0.0));
    const std::vector<double> pm{-1.0, 1.0};
    CHECK(empirical_cf(pm, 1.0).real() == doctest::Approx(std::cos(1.0)));
    CHECK(std::abs(empirical_cf(pm, 1.0).imag()) < 1e-15);

    Generator gen = make_generator(52, 0, 0);
    std::vector<double> z(50000);
    for (auto& x : z) x = standard_normal(gen);
    const std::vector<double> grid{-2, -1, -0.5, 0.5, 1, 2};
    CHECK(ecf_distance(z, [](double u) { return std::complex<double>(std::exp(-u * u / 2), 0.0); }, grid) < 0.015);
  }

  TEST_CASE("standardization") {
    const std::vector<double> x{1.0, 2.0, 4.0};
    const auto y = standardize(x, 1.0, 2.0);
    CHECK(y == std::vector<double>{0.0, 0.5, 1.5});
    CHECK_THROWS_AS(standardize(x, 0.0, 0.0), DomainError);

    // KS is invariant under a common affine map of the data and the target.
    Generator gen = make_generator(53, 0, 0);
    std::vector<double> z(2000), w(2000);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = standard_normal(gen);
      w[i] = 5.0 + 3.0 * z[i];
    }
    const double direct = ks_statistic(z, normal_cdf);
    const double mapped = ks_statistic(standardize(w, 5.0, 3.0), normal_cdf);
    CHECK(mapped == doctest::Approx(direct).epsilon(1e-12));

    // Beta(1,1) at n = e^2: b = 2 - 2 + (1 - e^-2), a = sqrt(8/3).
    const auto model = FactorModel::beta(1, 1);
    const auto norm = normalization(model, std::exp(2.0), LimitCase::a);
    CHECK(norm.b == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));
    CHECK(norm.a == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  }

  TEST_CASE("summaries") {
    const std::vector<double> x{1, 2, 3, 4};
    const auto s = summarize(x);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.count == 4);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), DomainError);
  }
}
