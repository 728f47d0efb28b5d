#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "oracles.hpp"
#include "stickperm/errors.hpp"
#include "stickperm/goodness_of_fit.hpp"
#include "stickperm/samplers.hpp"

using namespace stickperm;

namespace {

double rising(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x + i;
  return r;
}

double choose(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

template <class Draw>
std::vector<double> counts_against(const ExactPartitionLaw& law, int reps, Draw draw, std::vector<double>& expected) {
  std::map<ExactPartitionLaw::Parts, std::size_t> index;
  for (const auto& [parts, p] : law.table()) index.emplace(parts, index.size());
  std::vector<double> obs(index.size() + 1, 0.0);
  expected.assign(index.size() + 1, 0.0);
  for (const auto& [parts, i] : index) expected[i] = reps * static_cast<double>(law.probability(parts));
  for (int r = 0; r < reps; ++r) {
    const auto it = index.find(to_parts(draw(r)));
    obs[it == index.end() ? index.size() : it->second] += 1.0;
  }
  return obs;
}

std::string sequence_key(const std::vector<std::uint64_t>& seq) {
  std::string k;
  for (const auto v : seq) k += std::to_string(v) + ",";
  return k;
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("decrement rows: uniform case and absorption") {
    const auto row = decrement_pmf(FactorModel::beta(1, 1), 5);
    for (int m = 1; m <= 5; ++m) CHECK(row.q(m) == doctest::Approx(0.2).epsilon(1e-14));
    for (const auto& model : {FactorModel::beta(0.3, 2), FactorModel::pareto_log(1.5)}) {
      const auto one = decrement_pmf(model, 1);
      REQUIRE(one.probs.size() == 1);
      CHECK(one.q(1) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("decrement rows for Beta(theta,1) match the Ewens closed form") {
    // Jump of size m from n: C(n,m) (theta)_{n-m} m! / ((theta+1)_{n-1} n).
    for (const double theta : {0.5, 1.0, 2.0}) {
      for (const int n : {3, 8, 20}) {
        const auto row = decrement_pmf(FactorModel::beta(theta, 1), n);
        for (int m = 1; m <= n; ++m) {
          const double want = choose(n, m) * rising(theta, n - m) * std::tgamma(m + 1.0) / (rising(theta + 1, n - 1) * n);
          CAPTURE(theta);
          CAPTURE(n);
          CAPTURE(m);
          CHECK(row.q(m) == doctest::Approx(want).epsilon(1e-11));
        }
      }
    }
  }

  TEST_CASE("decrement rows are stochastic") {
    std::vector<double> x{0.05, 0.3, 0.6, 0.95};
    std::vector<double> f{0.0, 2.0, 1.0, 0.0};
    double mass = 0;
    for (std::size_t i = 1; i < x.size(); ++i) mass += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    for (auto& v : f) v /= mass;
    const std::vector<FactorModel> models{FactorModel::beta(1, 1), FactorModel::beta(2, 1), FactorModel::beta(0.5, 3),
                                          FactorModel::pareto_log(1.5), FactorModel::pareto_log(2),
                                          FactorModel::tabulated(DensityTable::from_points(x, f))};
    for (const auto& model : models) {
      for (const int n : {1, 2, 10, 100, 1000}) {
        const auto row = decrement_pmf(model, n);
        double s = 0.0;
        for (const double q : row.probs) {
          REQUIRE(q >= 0.0);
          s += q;
        }
        CAPTURE(model.spec());
        CAPTURE(n);
        CHECK(std::abs(s - 1.0) < 1e-12);
      }
    }
  }

  TEST_CASE("decrement table shares rows across threads") {
    const DecrementTable table(FactorModel::beta(2, 1));
    std::vector<std::shared_ptr<const DecrementRow>> got(8);
    {
      std::vector<std::jthread> pool;
      for (int t = 0; t < 8; ++t) pool.emplace_back([&, t] { got[t] = table.row(50); });
    }
    const auto ref = table.row(50);
    for (const auto& g : got) CHECK(g->probs == ref->probs);
    CHECK(table.row(50).get() == ref.get());
  }

  TEST_CASE("first jump from 5 is uniform for Beta(1,1)") {
    const DecrementTable table(FactorModel::beta(1, 1));
    Generator gen = make_generator(21, 0, 0);
    std::vector<double> obs(5, 0.0), expected(5, 20000.0);
    for (int r = 0; r < 100000; ++r) obs[table.row(5)->sample(gen) - 1] += 1.0;
    CHECK(chi_square(obs, expected).p_value > 1e-3);
  }

  TEST_CASE("n = 1 gives a single fixed point under every sampler") {
    for (const auto& model : {FactorModel::beta(1, 1), FactorModel::pareto_log(1.5)}) {
      Generator gen = make_generator(22, 0, 0);
      CHECK(sample_partition_markov(model, 1, gen).key() == "1");
      CHECK(sample_partition_thinning(model, 1, gen).key() == "1");
      CHECK(sample_permutation_basic(model, 1, gen).to_string() == "(1)");
    }
  }

  TEST_CASE("three samplers agree with the exact law and with each other") {
    const int reps = 30000;
    for (const auto& model : {FactorModel::beta(1, 1), FactorModel::beta(2, 1), FactorModel::pareto_log(1.5)}) {
      for (const int n : {6, 10}) {
        const auto law = exact_partition_law(model, n);
        const DecrementTable table(model);
        std::vector<double> expected;
        const auto markov = counts_against(law, reps, [&](int r) {
          Generator gen = make_generator(100, n, r);
          return sample_partition_markov(table, n, gen);
        }, expected);
        const auto thinning = counts_against(law, reps, [&](int r) {
          Generator gen = make_generator(200, n, r);
          return sample_partition_thinning(model, n, gen);
        }, expected);
        const auto basic = counts_against(law, reps, [&](int r) {
          Generator gen = make_generator(300, n, r);
          return sample_permutation_basic(model, n, gen).partition();
        }, expected);
        CAPTURE(model.spec());
        CAPTURE(n);
        CHECK(chi_square(markov, expected).p_value > 1e-3);
        CHECK(chi_square(thinning, expected).p_value > 1e-3);
        CHECK(chi_square(basic, expected).p_value > 1e-3);
        CHECK(chi_square_two_sample(markov, thinning).p_value > 1e-3);
        CHECK(chi_square_two_sample(markov, basic).p_value > 1e-3);
        CHECK(chi_square_two_sample(thinning, basic).p_value > 1e-3);
      }
    }
  }

  TEST_CASE("mass conservation at large n") {
    Generator gen = make_generator(23, 0, 0);
    for (const auto& model : {FactorModel::beta(1, 1), FactorModel::beta(0.4, 2), FactorModel::pareto_log(1.5)}) {
      for (int r = 0; r < 20; ++r) {
        const auto boxes = sample_box_sizes(model, 1000000, gen);
        std::uint64_t total = 0;
        for (const auto b : boxes) {
          REQUIRE(b >= 1);
          total += b;
        }
        CHECK(total == 1000000);
      }
      const auto perm = sample_permutation_basic(model, 5000, gen);
      CHECK(perm.n() == 5000);
    }
  }

  TEST_CASE("thinning at n = 1e8: mean cycle count matches the Ewens expectation") {
    // For Beta(theta,1), E K_n = sum_{i<n} theta/(theta+i) = theta (psi(theta+n) - psi(theta)).
    const double theta = 2.0, n = 1e8;
    const double want = theta * (boost::math::digamma(theta + n) - boost::math::digamma(theta));
    const FactorModel model = FactorModel::beta(theta, 1);
    std::vector<double> k;
    for (int r = 0; r < 4000; ++r) {
      Generator gen = make_generator(24, 0, r);
      k.push_back(static_cast<double>(sample_partition_thinning(model, 100000000, gen).cycle_count()));
    }
    const auto s = summarize(k);
    CHECK(std::abs(s.mean - want) < 3.0 * std::sqrt(s.variance / k.size()));
  }

  TEST_CASE("regeneration: deleting the last cycle leaves the law at n - m") {
    const FactorModel model = FactorModel::beta(2, 1);
    const int n = 8, reps = 60000;
    std::map<std::uint64_t, std::vector<CyclePartition>> rest;
    for (int r = 0; r < reps; ++r) {
      Generator gen = make_generator(25, 0, r);
      const auto perm = sample_permutation_basic(model, n, gen);
      const auto& cycles = perm.cycles();
      const std::uint64_t last = cycles.back().size();
      std::vector<std::uint64_t> others;
      for (std::size_t i = 0; i + 1 < cycles.size(); ++i) others.push_back(cycles[i].size());
      if (others.empty()) continue;
      rest[last].push_back(CyclePartition::from_lengths(n - last, others));
    }
    int tested = 0;
    for (const auto& [m, parts] : rest) {
      if (parts.size() < 2000) continue;
      const auto law = exact_partition_law(model, n - m);
      std::vector<double> expected;
      const auto obs = counts_against(law, static_cast<int>(parts.size()), [&](int i) { return parts[i]; }, expected);
      CAPTURE(m);
      CHECK(chi_square(obs, expected).p_value > 1e-3);
      ++tested;
    }
    CHECK(tested >= 3);
  }

  TEST_CASE("Ewens case: min-element order and reversed construction order share the chain law") {
    const double theta = 2.0;
    const int n = 6, reps = 60000;
    const FactorModel model = FactorModel::beta(theta, 1);
    // Law of the ordered jump sequence of the chain.
    std::map<std::string, double> chain;
    std::vector<std::uint64_t> path;
    std::function<void(int, double)> walk = [&](int state, double p) {
      if (state == 0) {
        chain[sequence_key(path)] += p;
        return;
      }
      const auto row = decrement_pmf(model, state);
      for (int m = 1; m <= state; ++m) {
        path.push_back(m);
        walk(state - m, p * row.q(m));
        path.pop_back();
      }
    };
    walk(n, 1.0);
    std::map<std::string, double> by_min, reversed;
    for (int r = 0; r < reps; ++r) {
      Generator gen = make_generator(26, 0, r);
      auto cycles = sample_permutation_basic(model, n, gen).cycles();
      std::vector<std::uint64_t> rev;
      for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) rev.push_back(it->size());
      reversed[sequence_key(rev)] += 1.0;
      std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
      });
      std::vector<std::uint64_t> mins;
      for (const auto& c : cycles) mins.push_back(c.size());
      by_min[sequence_key(mins)] += 1.0;
    }
    for (auto* sample : {&by_min, &reversed}) {
      std::vector<double> obs, expected;
      for (const auto& [key, p] : chain) {
        obs.push_back(sample->count(key) ? sample->at(key) : 0.0);
        expected.push_back(p * reps);
      }
      CHECK(chi_square(obs, expected).p_value > 1e-3);
    }
  }

  TEST_CASE("divisibility bound") {
    CHECK(divisibility_bound(FactorModel::beta(2, 1), 20, 11) == 0.0);
    CHECK(divisibility_bound(FactorModel::beta(1, 1), 100, 2) == doctest::Approx(0.98).epsilon(1e-12));
    const auto max_over_k = [](std::uint64_t n) {
      const auto row = decrement_pmf(FactorModel::beta(2, 1), n);
      double best = 0.0;
      for (std::uint64_t k = 1; k <= n; ++k) best = std::max(best, divisibility_bound(row, k));
      return best;
    };
    const double m50 = max_over_k(50), m100 = max_over_k(100), m200 = max_over_k(200), m400 = max_over_k(400);
    CHECK(m400 <= 1.05 * m100);
    CHECK(m200 <= 1.05 * m50);
    CHECK_THROWS_AS(divisibility_bound(FactorModel::beta(1, 1), 10, 11), DomainError);
  }

  TEST_CASE("frequency prefix") {
    const FactorModel model = FactorModel::beta(1, 1);
    Generator gen = make_generator(27, 0, 0);
    const auto one = frequency_prefix(model, 1, gen);
    REQUIRE(one.size() == 1);
    CHECK(one[0] > 0.0);
    CHECK(one[0] < 1.0);
    for (int r = 0; r < 200; ++r) {
      // Replay the same draws to rebuild W_1 ... W_j.
      Generator a = make_generator(28, 0, r), b = make_generator(28, 0, r);
      const auto p = frequency_prefix(model, 30, a);
      double prod = 1.0, partial = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        REQUIRE(p[i] > 0.0);
        partial += p[i];
        REQUIRE(partial <= 1.0 + 1e-12);
        prod *= model.draw(b).w;
      }
      CHECK(std::abs(partial - (1.0 - prod)) < 1e-12);
    }
    std::vector<double> first;
    for (int r = 0; r < 1000000; ++r) first.push_back(frequency_prefix(model, 1, gen)[0]);
    const auto s = summarize(first);
    CHECK(std::abs(s.mean - 0.5) < 3.0 * std::sqrt(s.variance / first.size()));
  }
}
