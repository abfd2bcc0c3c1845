#include "batchtail/policy.hpp"

#include <cmath>

#include "batchtail/errors.hpp"

namespace batchtail {

namespace {

void check_probs(const std::array<double, 2>& p, const char* what) {
  if (!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0)) {
    throw parameter_error(std::string(what) + ": probabilities must lie in (0,1)");
  }
  if (std::abs(p[0] + p[1] - 1.0) > 1e-12) {
    throw parameter_error(std::string(what) + ": probabilities must sum to 1");
  }
}

}  // namespace

Policy Policy::fixed(std::array<double, 2> probs) {
  Policy p;
  p.kind = Kind::fixed;
  p.probs = probs;
  p.validate();
  return p;
}

Policy Policy::eps_greedy(double clip) {
  Policy p;
  p.kind = Kind::eps_greedy;
  p.clip = clip;
  p.validate();
  return p;
}

Policy Policy::threshold(double a1, double a2, std::array<double, 2> low,
                         std::array<double, 2> mid, std::array<double, 2> high) {
  Policy p;
  p.kind = Kind::threshold;
  p.a1 = a1;
  p.a2 = a2;
  p.probs_low = low;
  p.probs_mid = mid;
  p.probs_high = high;
  p.validate();
  return p;
}

void Policy::validate() const {
  switch (kind) {
    case Kind::fixed:
      check_probs(probs, "fixed policy");
      return;
    case Kind::eps_greedy:
      if (!(clip > 0.0 && clip < 0.5)) {
        throw parameter_error("eps_greedy clip must lie in (0, 0.5)");
      }
      return;
    case Kind::threshold:
      if (!(a1 <= a2)) throw parameter_error("threshold policy requires a1 <= a2");
      check_probs(probs_low, "threshold low");
      check_probs(probs_mid, "threshold mid");
      check_probs(probs_high, "threshold high");
      return;
  }
  throw parameter_error("unknown policy kind");
}

std::vector<std::array<double, 2>> Policy::branches() const {
  switch (kind) {
    case Kind::fixed:
      return {probs};
    case Kind::eps_greedy:
      return {{1.0 - clip, clip}, {clip, 1.0 - clip}};
    case Kind::threshold:
      return {probs_low, probs_mid, probs_high};
  }
  throw parameter_error("unknown policy kind");
}

int policy_branch(double h, const Policy& policy) {
  switch (policy.kind) {
    case Policy::Kind::fixed:
      return 0;
    case Policy::Kind::eps_greedy:
      return h >= 0.0 ? 0 : 1;
    case Policy::Kind::threshold:
      return h <= policy.a1 ? 0 : (h > policy.a2 ? 2 : 1);
  }
  throw parameter_error("unknown policy kind");
}

StrategyChoice stage2_strategy(double h, const Policy& policy) {
  policy.validate();
  StrategyChoice c;
  c.branch = policy_branch(h, policy);
  c.probs = policy.branches()[c.branch];
  switch (policy.kind) {
    case Policy::Kind::fixed:
      c.label = "fixed";
      break;
    case Policy::Kind::eps_greedy:
      c.label = c.branch == 0 ? "arm1_favored" : "arm2_favored";
      break;
    case Policy::Kind::threshold:
      c.label = c.branch == 0 ? "low" : (c.branch == 1 ? "mid" : "high");
      break;
  }
  return c;
}

double CountLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) m += (lo + static_cast<int>(k)) * weights[k];
  return m;
}

double CountLaw::pmf(int count) const {
  const int k = count - lo;
  if (k < 0 || k >= static_cast<int>(weights.size())) return 0.0;
  return weights[k];
}

int CountLaw::draw(double u01) const {
  double cum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cum += weights[k];
    if (u01 <= cum) return lo + static_cast<int>(k);
  }
  return lo + static_cast<int>(weights.size()) - 1;
}

CountLaw clamped_binomial(int n, double p, int n_min) {
  if (n < 2 * n_min) {
    throw infeasible_design_error("clamped_binomial: batch size " + std::to_string(n) +
                                  " below 2 * n_min = " + std::to_string(2 * n_min));
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw parameter_error("clamped_binomial: p must lie in (0,1)");
  }
  if (n_min < 0) throw parameter_error("clamped_binomial: n_min must be >= 0");

  // Full pmf via log-gamma for stability, then fold the tails onto the floor.
  std::vector<double> pmf(n + 1);
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    const double lw = lgn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp +
                      (n - k) * lq;
    pmf[k] = std::exp(lw);
  }

  CountLaw law;
  law.n = n;
  law.n_min = n_min;
  law.lo = n_min;
  const int hi = n - n_min;
  law.weights.assign(hi - n_min + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    const int clamped = k < n_min ? n_min : (k > hi ? hi : k);
    law.weights[clamped - n_min] += pmf[k];
  }
  return law;
}

}  // namespace batchtail
