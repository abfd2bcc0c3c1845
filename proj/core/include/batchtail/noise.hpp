#pragma once

#include <cstdint>
#include <vector>

#include "batchtail/rng.hpp"

namespace batchtail {

/// Standardized raw moments E[e^r] of a mean-0 variance-1 noise law.
struct MomentSet {
  double sigma2 = 1.0;
  double mu3 = 0.0;
  double mu4 = 3.0;
  double mu5 = 0.0;
  double mu6 = 15.0;
};

/// A noise family, always affinely standardized to mean 0 and variance 1.
/// The expansion consumes exact population moments, so standardization is
/// analytic (exact mean and standard deviation), never empirical.
struct NoiseModel {
  enum class Family { normal, gamma, mixture };

  Family family = Family::normal;

  // gamma(shape k, scale theta); only the shape survives standardization,
  // the scale is kept for config fidelity.
  double shape = 1.0;
  double scale = 1.0;

  // two-component normal mixture: weight w on N(mean1, var1), 1-w on N(mean2, var2)
  double weight = 0.5;
  double mean1 = 0.0, var1 = 1.0;
  double mean2 = 0.0, var2 = 1.0;

  static NoiseModel normal();
  static NoiseModel gamma(double shape, double scale);
  static NoiseModel mixture(double weight, double mean1, double var1, double mean2, double var2);

  void validate() const;  // throws parameter_error
};

/// Exact standardized moments up to order 6.
MomentSet standardized_moments(const NoiseModel& model);

/// i.i.d. draws from the standardized law. Identical (seed, stream) gives
/// bit-identical output; draw i depends only on (seed, stream, i), so any
/// prefix/suffix split across threads reproduces the same sequence.
std::vector<double> sample(const NoiseModel& model, RngStream stream, std::size_t count);

/// Single indexed draw; sample()[i] == sample_at(i).
double sample_at(const NoiseModel& model, RngStream stream, std::uint64_t index);

}  // namespace batchtail
