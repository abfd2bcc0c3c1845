#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace batchtail {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution or policy parameters (negative shape, weight outside (0,1), ...).
class parameter_error : public error {
 public:
  using error::error;
};

/// Batch too small for the requested per-arm count floor (n < 2 * n_min).
class infeasible_design_error : public error {
 public:
  using error::error;
};

/// A stage with an empty arm or fewer than three subjects.
class degenerate_design_error : public error {
 public:
  using error::error;
};

/// Residual variance is zero; the studentized statistic is undefined.
class degenerate_variance_error : public error {
 public:
  using error::error;
};

/// Stage covariance matrix is singular or not positive definite.
class expansion_degenerate_error : public error {
 public:
  using error::error;
};

/// Root bracket does not straddle the requested level.
class bracket_error : public error {
 public:
  bracket_error(const std::string& msg, double lo, double hi, double f_lo, double f_hi)
      : error(msg), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
  double lo, hi, f_lo, f_hi;
};

/// Config schema violation; carries the offending keys.
class validation_error : public error {
 public:
  validation_error(const std::string& msg, std::vector<std::string> keys)
      : error(msg), keys(std::move(keys)) {}
  std::vector<std::string> keys;
};

}  // namespace batchtail
