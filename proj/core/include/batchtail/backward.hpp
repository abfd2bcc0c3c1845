#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "batchtail/design.hpp"
#include "batchtail/edgeworth.hpp"
#include "batchtail/math.hpp"

namespace batchtail {

/// Statistic weights at given arm counts for one stage of an S-stage design:
///   l_dot  = S^{-1/2} (sqrt(N2/n), -sqrt(N1/n))   (combination weights)
///   l_ddot = (sqrt(n/N1), -sqrt(n/N2))            (decision-statistic weights)
struct StatWeights {
  Vec2 l_dot{};
  Vec2 l_ddot{};
};

StatWeights stat_weights(int stages, int n, int n1);

struct TailEstimate {
  double x = 0.0;
  double value = 0.0;        // estimated P[T >= x]
  double stderr_est = 0.0;   // IS standard error
  std::int64_t draws = 0;
  /// Enumerated (stage-1 count, stage-2 branch) masses; sums to 1 up to support pruning.
  std::vector<double> branch_weights;
  bool expansion_fallback = false;
};

/// Indicator 1{ sum_s l_dot_s . (y_dot_s - y_ddot_s * y_dot_s / (2 sqrt(n_s))) >= x }
/// evaluated exactly on y-coordinates.
double integrand(std::span<const Vec3> y, std::span<const StatWeights> weights,
                 std::span<const int> n, double x);

/// Per-stage Gaussian proposal N((x*a, 0), p * vbar) with a = l_dot / sum_sq_ldot,
/// where sum_sq_ldot aggregates |l_dot_s|^2 over all stages.
MvNormal3 proposal(double x, const Vec2& l_dot, double sum_sq_ldot, const Mat3& vbar, double p);

/// Plain two-stage importance-sampling estimator: returns (value, stderr) of
/// N^{-1} sum f(xi_1, xi_2) / (q1(xi_1) q2(xi_2)). Draw i is deterministic in
/// (seed, i), independent across stages.
std::pair<double, double> is_estimate(const std::function<double(const Vec3&, const Vec3&)>& f,
                                      const MvNormal3& q1, const MvNormal3& q2,
                                      std::int64_t draws, std::uint64_t seed, int threads = 0);

/// Evaluates the backward tail approximation for one design. Construction draws a
/// shared importance sample from proposals centered at x_ref and precomputes all
/// per-count densities; tail(x) then reuses those draws for any x (common random
/// numbers), so x -> tail(x) is deterministic and monotone up to the signed
/// measure's tiny negative mass.
///
/// Count enumeration is exact over the clamped-binomial support (pruned to
/// cumulative mass 1 - 1e-11 per tail); the policy branch is resolved pointwise
/// from the sign statistic of the stage-1 draw.
class TailEvaluator {
 public:
  TailEvaluator(const DesignConfig& config, double x_ref);

  TailEstimate tail(double x) const;

  /// Same estimate with the stage-1 integral pre-split into per-branch
  /// half-spaces; algebraically identical to tail(), used as a consistency check.
  TailEstimate tail_presplit(double x) const;

  /// Estimate of the total expansion mass (the integrand without the indicator)
  /// with its IS standard error; converges to 1.
  std::pair<double, double> mass() const;

  double x_ref() const { return x_ref_; }
  bool expansion_fallback() const { return fallback_; }
  const std::vector<double>& branch_weights() const { return branch_weights_; }

 private:
  struct BranchData {
    std::vector<int> counts;
    std::vector<double> weights;
    std::vector<Vec2> l_dot;
    std::vector<Vec2> l_ddot;
    double weight_sum = 0.0;
    // middle stages: dens[m][i] = weight * psi~ (stage 0 also folds in 1/q)
    std::vector<std::vector<double>> dens;
    // last stage: per-draw sorted u values and suffix sums of weight * psi~
    std::vector<double> u_sorted;  // [i * M + k]
    std::vector<double> suffix;    // [i * (M+1) + k]
  };
  struct StageData {
    int n = 0;
    double sqrt_n = 1.0;
    double sigma = 1.0;
    std::vector<BranchData> branches;
    // per-draw quantities (structure-of-arrays)
    std::vector<double> ydot0, ydot1, v0, v1;
  };

  double eval_draw(std::int64_t i, double x, bool lower_side) const;
  double eval_draw_presplit(std::int64_t i, double x, bool lower_side) const;
  TailEstimate finalize(double x, const std::vector<double>& ratios) const;
  int next_branch(const StageData& st, const BranchData& br, std::size_t m,
                  std::int64_t i) const;

  int stages_ = 0;
  std::int64_t draws_ = 0;
  int threads_ = 0;
  double x_ref_ = 0.0;
  bool lower_side_ = false;  // estimate mass below x and subtract from the known total
  double total_mass_ = 1.0;  // analytic mass of the enumerated signed mixture
  bool fallback_ = false;
  Policy policy_;
  std::vector<StageData> stage_;
  std::vector<double> branch_weights_;
};

/// One-shot tail estimate with the proposal centered at the queried x.
TailEstimate tail_probability(double x, const DesignConfig& config);

}  // namespace batchtail
