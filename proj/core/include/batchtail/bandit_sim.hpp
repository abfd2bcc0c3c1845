#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "batchtail/design.hpp"

namespace batchtail {

struct BolsResult {
  double delta_hat = 0.0;
  double sigma_hat2 = 0.0;
};

/// Batched OLS for one stage: arm-mean difference and the (n-1)-normalized
/// residual variance. `arms` holds 0-based arm indices (0 = arm 1).
BolsResult bols(std::span<const double> rewards, std::span<const int> arms);

/// Aggregated test statistic under the null:
///   S^{-1/2} * sum_s sqrt(N_{s,1} N_{s,2}) / (sqrt(n_s) sigma_hat_s) * delta_hat_s
double test_statistic(std::span<const StageOutcome> stages);

struct TrialResult {
  std::vector<StageOutcome> stages;
  double statistic = 0.0;
  int resample_attempts = 0;  // degenerate-variance retries (astronomically rare)
};

/// Simulate one full trial under H0 (both arms identical, beta = 0).
/// Deterministic in (config.seed, rep_index) and thread-count independent.
TrialResult simulate_trial(const DesignConfig& config, std::uint64_t rep_index);

struct McQuantile {
  double alpha = 0.0;
  double quantile = 0.0;
  double stderr_est = 0.0;  // binomial (Woodruff) order-statistic standard error
};

struct McResult {
  std::vector<McQuantile> quantiles;
  std::int64_t replications = 0;
  std::int64_t resampled = 0;  // total degenerate-variance resamples across reps
};

/// Empirical quantiles of the simulated statistic over config.mc.reps replications.
McResult mc_quantiles(const DesignConfig& config, std::span<const double> alphas);

/// All simulated statistics (sorted), for callers needing the full empirical law.
std::vector<double> mc_statistics(const DesignConfig& config, std::int64_t reps,
                                  std::int64_t* resampled = nullptr);

}  // namespace batchtail
