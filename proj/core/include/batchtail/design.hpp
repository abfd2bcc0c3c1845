#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "batchtail/noise.hpp"
#include "batchtail/policy.hpp"

namespace batchtail {

struct ExpansionSettings {
  int order = 1;         // 0 = Gaussian only, 1 = first-order correction
  bool reduced = false;  // drop the mu5/mu6 terms
};

struct IsSettings {
  std::int64_t draws = 200000;
  double scale_p = 2.0;  // proposal covariance = scale_p * stage covariance
};

struct McSettings {
  std::int64_t reps = 500000;
};

/// Full description of a multi-stage design plus evaluation settings.
struct DesignConfig {
  int stages = 2;
  std::vector<int> n;                    // batch size per stage
  std::vector<NoiseModel> noise;         // per stage (size == stages)
  std::array<double, 2> stage1_probs{0.5, 0.5};
  Policy stage2_policy;                  // applies to stages 2..S
  int min_arm_count = 5;
  ExpansionSettings expansion;
  IsSettings is;
  McSettings mc;
  std::vector<double> alphas{0.025, 0.05, 0.95, 0.975};
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;  // throws infeasible_design_error / parameter_error
};

/// Per-stage batch summary: arm counts, BOLS difference, residual variance,
/// and the stage vector (z_dot, z_ddot) feeding the expansion.
struct StageOutcome {
  std::array<int, 2> counts{0, 0};
  double delta_hat = 0.0;
  double sigma_hat2 = 0.0;
  std::array<double, 2> z_dot{0.0, 0.0};
  double z_ddot = 0.0;
};

}  // namespace batchtail
