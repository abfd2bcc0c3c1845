#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchtail/errors.hpp"
#include "batchtail/noise.hpp"
#include "oracles.hpp"

using namespace batchtail;

TEST_CASE("normal moments are exact") {
  const MomentSet ms = standardized_moments(NoiseModel::normal());
  CHECK(ms.sigma2 == 1.0);
  CHECK(ms.mu3 == 0.0);
  CHECK(ms.mu4 == 3.0);
  CHECK(ms.mu5 == 0.0);
  CHECK(ms.mu6 == 15.0);
}

TEST_CASE("gamma(3,2) moments match cumulant formulas and quadrature") {
  const MomentSet ms = standardized_moments(NoiseModel::gamma(3.0, 2.0));
  CHECK(ms.mu3 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(ms.mu4 == doctest::Approx(5.0).epsilon(1e-12));

  const MomentSet q = oracles::gamma_moments_quadrature(3.0, 2.0);
  CHECK(ms.mu3 == doctest::Approx(q.mu3).epsilon(1e-8));
  CHECK(ms.mu4 == doctest::Approx(q.mu4).epsilon(1e-8));
  CHECK(ms.mu5 == doctest::Approx(q.mu5).epsilon(1e-8));
  CHECK(ms.mu6 == doctest::Approx(q.mu6).epsilon(1e-8));
}

TEST_CASE("gamma scale drops out after standardization") {
  const MomentSet a = standardized_moments(NoiseModel::gamma(3.0, 2.0));
  const MomentSet b = standardized_moments(NoiseModel::gamma(3.0, 17.5));
  CHECK(a.mu3 == b.mu3);
  CHECK(a.mu6 == b.mu6);
}

TEST_CASE("mixture moments match the quadrature oracle to 1e-8") {
  const NoiseModel m = NoiseModel::mixture(0.7, 0.0, 1.0, 3.0, 4.0);
  const MomentSet ms = standardized_moments(m);
  const MomentSet q = oracles::mixture_moments_quadrature(0.7, 0.0, 1.0, 3.0, 4.0);
  CHECK(ms.mu3 == doctest::Approx(q.mu3).epsilon(1e-8));
  CHECK(ms.mu4 == doctest::Approx(q.mu4).epsilon(1e-8));
  CHECK(ms.mu5 == doctest::Approx(q.mu5).epsilon(1e-8));
  CHECK(ms.mu6 == doctest::Approx(q.mu6).epsilon(1e-8));
  // Pre-standardization mean and variance by direct arithmetic.
  CHECK(0.7 * 0.0 + 0.3 * 3.0 == doctest::Approx(0.9));
  CHECK(0.7 * 1.0 + 0.3 * (9.0 + 4.0) - 0.81 == doctest::Approx(3.79));
}

TEST_CASE("moment inequality mu4 >= 1 + mu3^2 holds across families") {
  for (const NoiseModel& m :
       {NoiseModel::normal(), NoiseModel::gamma(0.7, 1.0), NoiseModel::gamma(3.0, 2.0),
        NoiseModel::mixture(0.7, 0.0, 1.0, 3.0, 4.0), NoiseModel::mixture(0.2, -1.0, 0.5, 2.0, 2.0)}) {
    const MomentSet ms = standardized_moments(m);
    CHECK(ms.mu4 >= 1.0 + ms.mu3 * ms.mu3 - 1e-12);
  }
}

TEST_CASE("gamma skewness is positive and decreases to 0 in the shape") {
  double prev = 1e30;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 32.0, 128.0}) {
    const double mu3 = standardized_moments(NoiseModel::gamma(k, 1.0)).mu3;
    CHECK(mu3 > 0.0);
    CHECK(mu3 < prev);
    prev = mu3;
  }
}

TEST_CASE("invalid parameters raise parameter_error") {
  CHECK_THROWS_AS(standardized_moments(NoiseModel::gamma(-1.0, 2.0)), parameter_error);
  CHECK_THROWS_AS(standardized_moments(NoiseModel::mixture(1.2, 0, 1, 3, 4)), parameter_error);
  CHECK_THROWS_AS(standardized_moments(NoiseModel::mixture(0.5, 0, -1, 3, 4)), parameter_error);
}

TEST_CASE("sampling is deterministic in (seed, stream, index)") {
  const NoiseModel m = NoiseModel::gamma(3.0, 2.0);
  const RngStream s{42, 7};
  const auto a = sample(m, s, 1000);
  const auto b = sample(m, s, 1000);
  CHECK(a == b);
  // Indexed access agrees with the bulk path.
  CHECK(a[137] == sample_at(m, s, 137));
  // A different stream decorrelates.
  const auto c = sample(m, RngStream{42, 8}, 1000);
  CHECK(a != c);
}

TEST_CASE("empirical moments match standardized_moments within 3 MC standard errors") {
  const std::size_t n = 1000000;
  int family = 0;
  for (const NoiseModel& m : {NoiseModel::normal(), NoiseModel::gamma(3.0, 2.0),
                              NoiseModel::mixture(0.7, 0.0, 1.0, 3.0, 4.0)}) {
    const MomentSet ms = standardized_moments(m);
    const auto xs = sample(m, RngStream{2024, static_cast<std::uint64_t>(family++)}, n);
    double s1 = 0, s2 = 0, s3 = 0;
    for (double x : xs) {
      s1 += x;
      s2 += x * x;
      s3 += x * x * x;
    }
    const double mean = s1 / n, m2 = s2 / n, m3 = s3 / n;
    CHECK(std::abs(mean) < 5e-3);
    CHECK(std::abs(m2 - 1.0) < 5e-3 * std::sqrt(ms.mu4));

    // se of the r-th sample moment is sqrt((mu_{2r} - mu_r^2)/n)
    const double se3 = std::sqrt((ms.mu6 - ms.mu3 * ms.mu3) / n);
    CHECK(std::abs(m3 - ms.mu3) < 3.0 * se3);
  }
}

TEST_CASE("gamma sample third moment near 2/sqrt(3) at 1e6 draws") {
  const auto xs = sample(NoiseModel::gamma(3.0, 2.0), RngStream{99, 1}, 1000000);
  double s3 = 0;
  for (double x : xs) s3 += x * x * x;
  CHECK(std::abs(s3 / xs.size() - 2.0 / std::sqrt(3.0)) < 2e-2);
}
