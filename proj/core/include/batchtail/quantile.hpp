#pragma once

#include <functional>
#include <string>

namespace batchtail {

struct QuantileResult {
  double alpha = 0.0;
  double x_hat = 0.0;
  std::string method;        // "ae" | "mc" | "normal"
  double uncertainty = 0.0;  // IS stderr at the root, MC order-statistic se, or 0
};

/// Standard-normal quantile (AS241). Antisymmetric: normal_quantile(p) equals
/// -normal_quantile(q) exactly whenever p and q are exact complements.
double normal_quantile(double alpha);

/// Invert a monotone tail function: find x with tail_fn(x) = 1 - alpha by
/// bisection down to |bracket| <= tol. The tail function must use common random
/// numbers across x so the root function is deterministic. The bracket widens
/// by doubling (up to 4x each endpoint) before giving up with a bracket_error.
QuantileResult quantile(const std::function<double(double)>& tail_fn, double alpha,
                        double lo = -8.0, double hi = 8.0, double tol = 1e-4);

}  // namespace batchtail
