#include "batchtail/noise.hpp"

#include <cmath>

#include "batchtail/errors.hpp"
#include "batchtail/math.hpp"

namespace batchtail {

NoiseModel NoiseModel::normal() { return NoiseModel{}; }

NoiseModel NoiseModel::gamma(double shape, double scale) {
  NoiseModel m;
  m.family = Family::gamma;
  m.shape = shape;
  m.scale = scale;
  m.validate();
  return m;
}

NoiseModel NoiseModel::mixture(double weight, double mean1, double var1, double mean2,
                               double var2) {
  NoiseModel m;
  m.family = Family::mixture;
  m.weight = weight;
  m.mean1 = mean1;
  m.var1 = var1;
  m.mean2 = mean2;
  m.var2 = var2;
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  switch (family) {
    case Family::normal:
      return;
    case Family::gamma:
      if (!(shape > 0.0) || !(scale > 0.0)) {
        throw parameter_error("gamma noise requires shape > 0 and scale > 0");
      }
      return;
    case Family::mixture:
      if (!(weight > 0.0 && weight < 1.0)) {
        throw parameter_error("mixture weight must lie in (0,1)");
      }
      if (!(var1 > 0.0) || !(var2 > 0.0)) {
        throw parameter_error("mixture component variances must be positive");
      }
      return;
  }
  throw parameter_error("unknown noise family");
}

namespace {

// Raw moments of N(m, v) up to order 6.
void normal_raw_moments(double m, double v, double out[7]) {
  out[0] = 1.0;
  out[1] = m;
  out[2] = m * m + v;
  out[3] = m * m * m + 3.0 * m * v;
  out[4] = m * m * m * m + 6.0 * m * m * v + 3.0 * v * v;
  out[5] = std::pow(m, 5) + 10.0 * m * m * m * v + 15.0 * m * v * v;
  out[6] = std::pow(m, 6) + 15.0 * std::pow(m, 4) * v + 45.0 * m * m * v * v +
           15.0 * v * v * v;
}

MomentSet gamma_moments(double k) {
  // Standardized cumulants kappa_r = (r-1)! * k^{1 - r/2}; the scale cancels.
  const double k2 = 1.0;
  const double k3 = 2.0 / std::sqrt(k);
  const double k4 = 6.0 / k;
  const double k5 = 24.0 / (k * std::sqrt(k));
  const double k6 = 120.0 / (k * k);
  MomentSet ms;
  ms.sigma2 = k2;
  ms.mu3 = k3;
  ms.mu4 = k4 + 3.0 * k2 * k2;
  ms.mu5 = k5 + 10.0 * k3 * k2;
  ms.mu6 = k6 + 15.0 * k4 * k2 + 10.0 * k3 * k3 + 15.0 * k2 * k2 * k2;
  return ms;
}

MomentSet mixture_moments(const NoiseModel& m) {
  double r1[7], r2[7], raw[7];
  normal_raw_moments(m.mean1, m.var1, r1);
  normal_raw_moments(m.mean2, m.var2, r2);
  for (int r = 0; r <= 6; ++r) raw[r] = m.weight * r1[r] + (1.0 - m.weight) * r2[r];
  const double mu = raw[1];
  const double var = raw[2] - mu * mu;
  // Central moments by binomial expansion, then scale by var^{-r/2}.
  double central[7];
  central[0] = 1.0;
  for (int r = 1; r <= 6; ++r) {
    double c = 0.0, binom = 1.0;
    for (int j = 0; j <= r; ++j) {
      c += binom * raw[r - j] * std::pow(-mu, j);
      binom = binom * (r - j) / (j + 1);
    }
    central[r] = c;
  }
  const double sd = std::sqrt(var);
  MomentSet ms;
  ms.sigma2 = 1.0;
  ms.mu3 = central[3] / std::pow(sd, 3);
  ms.mu4 = central[4] / std::pow(sd, 4);
  ms.mu5 = central[5] / std::pow(sd, 5);
  ms.mu6 = central[6] / std::pow(sd, 6);
  return ms;
}

// Marsaglia-Tsang for shape >= 1; shape < 1 boosted via gamma(k+1) * U^{1/k}.
double gamma_standard_draw(CounterRng& rng, double k) {
  double boost = 1.0;
  if (k < 1.0) {
    boost = std::pow(rng.next_u01(), 1.0 / k);
    k += 1.0;
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.next_u01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return boost * d * v;
    }
  }
}

}  // namespace

MomentSet standardized_moments(const NoiseModel& model) {
  model.validate();
  switch (model.family) {
    case NoiseModel::Family::normal:
      return MomentSet{1.0, 0.0, 3.0, 0.0, 15.0};
    case NoiseModel::Family::gamma:
      return gamma_moments(model.shape);
    case NoiseModel::Family::mixture:
      return mixture_moments(model);
  }
  throw parameter_error("unknown noise family");
}

double sample_at(const NoiseModel& model, RngStream stream, std::uint64_t index) {
  model.validate();
  CounterRng rng(stream, index);
  switch (model.family) {
    case NoiseModel::Family::normal:
      return rng.next_normal();
    case NoiseModel::Family::gamma: {
      // (Gamma(k, theta) - k*theta) / (theta*sqrt(k)); theta cancels.
      const double g = gamma_standard_draw(rng, model.shape);
      return (g - model.shape) / std::sqrt(model.shape);
    }
    case NoiseModel::Family::mixture: {
      const double u = rng.next_u01();
      double y;
      if (u < model.weight) {
        y = model.mean1 + std::sqrt(model.var1) * rng.next_normal();
      } else {
        y = model.mean2 + std::sqrt(model.var2) * rng.next_normal();
      }
      const double mu = model.weight * model.mean1 + (1.0 - model.weight) * model.mean2;
      const double ey2 = model.weight * (model.mean1 * model.mean1 + model.var1) +
                         (1.0 - model.weight) * (model.mean2 * model.mean2 + model.var2);
      return (y - mu) / std::sqrt(ey2 - mu * mu);
    }
  }
  throw parameter_error("unknown noise family");
}

std::vector<double> sample(const NoiseModel& model, RngStream stream, std::size_t count) {
  if (count < 1) throw parameter_error("sample: count must be >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = sample_at(model, stream, i);
  return out;
}

}  // namespace batchtail
