#pragma once

#include <array>
#include <string>
#include <vector>

namespace batchtail {

/// Assignment-strategy kernel for a stage: maps the previous stage's decision
/// statistic to arm probabilities.
struct Policy {
  enum class Kind { fixed, eps_greedy, threshold };

  Kind kind = Kind::fixed;

  // fixed
  std::array<double, 2> probs{0.5, 0.5};

  // eps_greedy: favored arm gets 1-clip, the other clip
  double clip = 0.2;

  // threshold hook (Thompson-style): h <= a1 -> low, h > a2 -> high, else mid
  double a1 = 0.0, a2 = 0.0;
  std::array<double, 2> probs_low{0.5, 0.5};
  std::array<double, 2> probs_mid{0.5, 0.5};
  std::array<double, 2> probs_high{0.5, 0.5};

  static Policy fixed(std::array<double, 2> probs);
  static Policy eps_greedy(double clip);
  static Policy threshold(double a1, double a2, std::array<double, 2> low,
                          std::array<double, 2> mid, std::array<double, 2> high);

  void validate() const;  // throws parameter_error

  /// Branches the kernel can select, in a fixed enumeration order.
  std::vector<std::array<double, 2>> branches() const;
};

struct StrategyChoice {
  int branch = 0;  // index into Policy::branches()
  std::string label;
  std::array<double, 2> probs{0.5, 0.5};
};

/// Branch index selected by the decision statistic h, in Policy::branches() order.
/// eps_greedy: h >= 0 favors arm 1 (ties break to arm 1).
int policy_branch(double h, const Policy& policy);

/// Resolve the stage strategy from the decision statistic h.
StrategyChoice stage2_strategy(double h, const Policy& policy);

/// Arm-1 count law on {n_min, ..., n - n_min}: binomial(n, p) with all mass
/// below n_min folded onto n_min and all mass above n-n_min folded onto
/// n-n_min. Folding (not renormalization) keeps total mass exactly 1.
struct CountLaw {
  int n = 0;
  int n_min = 0;
  int lo = 0;                   // first support point (= n_min)
  std::vector<double> weights;  // weights[k] is the mass of count lo + k

  double mean() const;
  double pmf(int count) const;
  /// Inverse-CDF draw from one uniform.
  int draw(double u01) const;
};

CountLaw clamped_binomial(int n, double p, int n_min);

}  // namespace batchtail
