#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchtail/errors.hpp"
#include "batchtail/policy.hpp"
#include "batchtail/rng.hpp"

using namespace batchtail;

TEST_CASE("eps-greedy strategy follows the sign of h") {
  const Policy p = Policy::eps_greedy(0.2);
  auto c = stage2_strategy(1.3, p);
  CHECK(c.probs[0] == doctest::Approx(0.8));
  CHECK(c.probs[1] == doctest::Approx(0.2));
  c = stage2_strategy(-0.4, p);
  CHECK(c.probs[0] == doctest::Approx(0.2));
  CHECK(c.probs[1] == doctest::Approx(0.8));
  // h = 0 tie-breaks toward arm 1.
  CHECK(stage2_strategy(0.0, p).probs[0] == doctest::Approx(0.8));
}

TEST_CASE("fixed strategy ignores h") {
  const Policy p = Policy::fixed({0.2, 0.8});
  for (double h : {-5.0, 0.0, 0.3, 1e9}) {
    const auto c = stage2_strategy(h, p);
    CHECK(c.probs[0] == doctest::Approx(0.2));
    CHECK(c.probs[1] == doctest::Approx(0.8));
  }
}

TEST_CASE("threshold strategy is piecewise in h") {
  const Policy p = Policy::threshold(-1.0, 1.0, {0.7, 0.3}, {0.5, 0.5}, {0.3, 0.7});
  CHECK(stage2_strategy(-2.0, p).label == "low");
  CHECK(stage2_strategy(-1.0, p).label == "low");
  CHECK(stage2_strategy(0.0, p).label == "mid");
  CHECK(stage2_strategy(1.0, p).label == "mid");
  CHECK(stage2_strategy(1.5, p).label == "high");
}

TEST_CASE("strategy is invariant under positive scaling of h") {
  const Policy p = Policy::eps_greedy(0.31);
  CounterRng rng({5, 5}, 0);
  for (int i = 0; i < 200; ++i) {
    const double h = 4.0 * (rng.next_u01() - 0.5);
    const double c = std::exp(4.0 * (rng.next_u01() - 0.5));
    CHECK(stage2_strategy(h, p).branch == stage2_strategy(c * h, p).branch);
  }
}

TEST_CASE("clip near 0.5 approaches the uniform strategy") {
  const Policy p = Policy::eps_greedy(0.5 - 1e-9);
  const auto c = stage2_strategy(2.0, p);
  CHECK(c.probs[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("policy_branch agrees with stage2_strategy") {
  const Policy t = Policy::threshold(-0.5, 0.25, {0.6, 0.4}, {0.5, 0.5}, {0.4, 0.6});
  const Policy e = Policy::eps_greedy(0.2);
  CounterRng rng({6, 6}, 0);
  for (int i = 0; i < 200; ++i) {
    const double h = 3.0 * (rng.next_u01() - 0.5);
    CHECK(policy_branch(h, t) == stage2_strategy(h, t).branch);
    CHECK(policy_branch(h, e) == stage2_strategy(h, e).branch);
  }
}

TEST_CASE("clamped binomial folds boundary mass: n=4, p=1/2, floor 1") {
  const CountLaw law = clamped_binomial(4, 0.5, 1);
  REQUIRE(law.weights.size() == 3);
  CHECK(law.lo == 1);
  CHECK(law.weights[0] == doctest::Approx(5.0 / 16).epsilon(1e-12));
  CHECK(law.weights[1] == doctest::Approx(6.0 / 16).epsilon(1e-12));
  CHECK(law.weights[2] == doctest::Approx(5.0 / 16).epsilon(1e-12));
}

TEST_CASE("clamped binomial mass sums to 1 and respects bounds") {
  CounterRng rng({7, 7}, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + static_cast<int>(rng.next_u01() * 90);
    const int n_min = static_cast<int>(rng.next_u01() * (n / 2));
    const double p = 0.02 + 0.96 * rng.next_u01();
    const CountLaw law = clamped_binomial(n, p, n_min);
    double sum = 0.0;
    for (double w : law.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(law.lo == n_min);
    CHECK(law.lo + static_cast<int>(law.weights.size()) - 1 == n - n_min);
  }
}

TEST_CASE("symmetric p keeps the clamped law symmetric") {
  const CountLaw law = clamped_binomial(50, 0.5, 5);
  const std::size_t m = law.weights.size();
  for (std::size_t k = 0; k < m; ++k) {
    CHECK(law.weights[k] == doctest::Approx(law.weights[m - 1 - k]).epsilon(1e-12));
  }
  CHECK(law.mean() == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("folding adds upper-tail mass for p=0.8") {
  const CountLaw law = clamped_binomial(50, 0.8, 5);
  double best = -1.0;
  int best_count = -1;
  for (std::size_t k = 0; k < law.weights.size(); ++k) {
    if (law.weights[k] > best) {
      best = law.weights[k];
      best_count = law.lo + static_cast<int>(k);
    }
  }
  CHECK(best_count == 40);
  // folded weight at the cap dominates the plain pmf there
  const double plain45 = std::exp(std::lgamma(51.0) - std::lgamma(46.0) - std::lgamma(6.0) +
                                  45.0 * std::log(0.8) + 5.0 * std::log(0.2));
  CHECK(law.pmf(45) > plain45);
}

TEST_CASE("draws follow the law and infeasible designs throw") {
  CHECK_THROWS_AS(clamped_binomial(9, 0.5, 5), infeasible_design_error);
  CHECK_THROWS_AS(clamped_binomial(50, 0.0, 5), parameter_error);

  const CountLaw law = clamped_binomial(20, 0.3, 4);
  double mean = 0.0;
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) {
    CounterRng rng({11, 3}, static_cast<std::uint64_t>(i));
    mean += law.draw(rng.next_u01());
  }
  mean /= reps;
  CHECK(mean == doctest::Approx(law.mean()).epsilon(2e-3));
}
