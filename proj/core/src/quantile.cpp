#include "batchtail/quantile.hpp"

#include <cmath>

#include "batchtail/errors.hpp"
#include "batchtail/math.hpp"

namespace batchtail {

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw parameter_error("normal_quantile: alpha must lie in (0,1)");
  }
  return inverse_normal_cdf(alpha);
}

QuantileResult quantile(const std::function<double(double)>& tail_fn, double alpha, double lo,
                        double hi, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw parameter_error("quantile: alpha must lie in (0,1)");
  }
  const double level = 1.0 - alpha;  // tail(x_hat) = 1 - alpha

  // tail is non-increasing: need tail(lo) >= level >= tail(hi).
  double f_lo = tail_fn(lo);
  double f_hi = tail_fn(hi);
  for (int widen = 0; widen < 2 && !(f_lo >= level && level >= f_hi); ++widen) {
    lo *= 2.0;
    hi *= 2.0;
    f_lo = tail_fn(lo);
    f_hi = tail_fn(hi);
  }
  if (!(f_lo >= level && level >= f_hi)) {
    throw bracket_error("quantile: bracket does not straddle level " + std::to_string(level),
                        lo, hi, f_lo, f_hi);
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (tail_fn(mid) >= level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  QuantileResult r;
  r.alpha = alpha;
  r.x_hat = 0.5 * (lo + hi);
  return r;
}

}  // namespace batchtail
