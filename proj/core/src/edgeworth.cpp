#include "batchtail/edgeworth.hpp"

#include <cmath>

#include "batchtail/errors.hpp"

namespace batchtail {

Mat3 stage_covariance(const std::array<int, 2>& counts, int n, const MomentSet& moments,
                      double sigma2) {
  if (counts[0] + counts[1] != n || counts[0] < 1 || counts[1] < 1) {
    throw parameter_error("stage_covariance: counts must be positive and sum to n");
  }
  Mat3 v;
  v.m[0][0] = v.m[1][1] = sigma2;
  v.m[0][1] = v.m[1][0] = 0.0;
  v.m[2][2] = moments.mu4 - sigma2 * sigma2;
  for (int k = 0; k < 2; ++k) {
    const double c = std::sqrt(static_cast<double>(counts[k]) / n) * moments.mu3;
    v.m[k][2] = v.m[2][k] = c;
  }
  return v;
}

namespace {

inline int axis(int coord) {
  // Map the paper's coordinate labels {1, 2, 0} to storage axes {0, 1, 2}.
  if (coord == 1) return 0;
  if (coord == 2) return 1;
  if (coord == 0) return 2;
  throw parameter_error("HermiteIndex entries must lie in {1,2,0}");
}

inline double hermite3_axes(const Vec3& zeta, const Mat3& prec, int i, int j, int k) {
  return zeta[i] * zeta[j] * zeta[k] - zeta[i] * prec.m[j][k] - zeta[j] * prec.m[i][k] -
         zeta[k] * prec.m[i][j];
}

}  // namespace

double hermite3(const Vec3& z, const Mat3& v, const HermiteIndex& idx) {
  const Mat3 prec = inverse3(v);
  const Vec3 zeta{prec.m[0][0] * z[0] + prec.m[0][1] * z[1] + prec.m[0][2] * z[2],
                  prec.m[1][0] * z[0] + prec.m[1][1] * z[1] + prec.m[1][2] * z[2],
                  prec.m[2][0] * z[0] + prec.m[2][1] * z[1] + prec.m[2][2] * z[2]};
  return hermite3_axes(zeta, prec, axis(idx.a), axis(idx.b), axis(idx.c));
}

ExpansionMeasure::ExpansionMeasure(int n, const std::array<int, 2>& counts,
                                   const MomentSet& moments, double sigma2, int order,
                                   bool reduced)
    : n_(n), counts_(counts), sigma_(std::sqrt(sigma2)), order_(order) {
  if (!(sigma2 > 0.0)) throw parameter_error("ExpansionMeasure: sigma2 must be positive");
  v_ = stage_covariance(counts, n, moments, sigma2);

  Vec3 ev = sym3_eigenvalues(v_);
  if (!(ev[0] > 0.0)) {
    throw expansion_degenerate_error("ExpansionMeasure: stage covariance not positive definite");
  }
  if (ev[2] / ev[0] > 1e12) {
    // Ill-conditioned V: regularize and keep only the Gaussian term. The exact
    // scheme would place a Dirac mass here, which quadrature cannot use;
    // unreachable for the shipped configurations.
    for (int i = 0; i < 3; ++i) v_.m[i][i] += 1e-10 * (ev[0] + ev[1] + ev[2]);
    order_ = 0;
    fallback_ = true;
  }

  prec_ = inverse3(v_);
  norm_ = std::pow(2.0 * M_PI, -1.5) / std::sqrt(det3(v_));

  if (order_ >= 1) {
    const double s2 = sigma2;
    const double rn = std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 2; ++k) {
      c_kkk_[k] = (1.0 / 6.0) * moments.mu3 / std::sqrt(static_cast<double>(counts[k]));
    }
    c_kk0_ = 0.5 * (moments.mu4 - s2 * s2) / rn;
    if (!reduced) {
      for (int k = 0; k < 2; ++k) {
        c_k00_[k] = 0.5 * std::sqrt(static_cast<double>(counts[k])) / n *
                    (moments.mu5 - 2.0 * s2 * moments.mu3);
      }
      c_000_ = (1.0 / 6.0) *
               (moments.mu6 - 3.0 * s2 * moments.mu4 + 2.0 * s2 * s2 * s2) / rn;
    }
  }
}

double ExpansionMeasure::density(const Vec3& z) const {
  const double q0 = prec_.m[0][0] * z[0] + prec_.m[0][1] * z[1] + prec_.m[0][2] * z[2];
  const double q1 = prec_.m[1][0] * z[0] + prec_.m[1][1] * z[1] + prec_.m[1][2] * z[2];
  const double q2 = prec_.m[2][0] * z[0] + prec_.m[2][1] * z[1] + prec_.m[2][2] * z[2];
  const double quad = z[0] * q0 + z[1] * q1 + z[2] * q2;
  const double gauss = norm_ * std::exp(-0.5 * quad);
  if (order_ == 0) return gauss;

  const Vec3 zeta{q0, q1, q2};
  double corr = 0.0;
  for (int k = 0; k < 2; ++k) {
    corr += c_kkk_[k] * hermite3_axes(zeta, prec_, k, k, k);
    corr += c_kk0_ * hermite3_axes(zeta, prec_, k, k, 2);
    corr += c_k00_[k] * hermite3_axes(zeta, prec_, k, 2, 2);
  }
  corr += c_000_ * hermite3_axes(zeta, prec_, 2, 2, 2);
  return gauss * (1.0 + corr);
}

double ExpansionMeasure::transformed_density(const Vec3& y) const {
  const double s = sigma_;
  const double s2 = s * s;
  const double jac = s * s * s2;  // |det| of (y_dot, y_ddot) -> (s*y_dot, s^2*y_ddot)
  return jac * density(Vec3{s * y[0], s * y[1], s2 * y[2]});
}

Mat3 ExpansionMeasure::transformed_covariance() const {
  const double d[3] = {1.0 / sigma_, 1.0 / sigma_, 1.0 / (sigma_ * sigma_)};
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.m[i][j] = d[i] * v_.m[i][j] * d[j];
  return out;
}

double linear_expansion_density(std::span<const double> z, std::span<const double> g_at_counts,
                                std::span<const int> counts, int n, const MomentSet& moments) {
  const std::size_t k = z.size();
  if (g_at_counts.size() != k || counts.size() != k || k == 0) {
    throw parameter_error("linear_expansion_density: mismatched arm dimensions");
  }
  const double s2 = moments.sigma2;
  const double rn = std::sqrt(static_cast<double>(n));
  double gauss = 1.0, corr = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i] <= 0) throw parameter_error("linear_expansion_density: counts must be positive");
    const double x = static_cast<double>(counts[i]) / n;
    const double g = g_at_counts[i];
    const double lambda3 = g * g * g / std::sqrt(x) * moments.mu3;
    const double zi = z[i];
    gauss *= normal_pdf(zi / std::sqrt(s2)) / std::sqrt(s2);
    const double h3 = (zi * zi * zi - 3.0 * s2 * zi) / (s2 * s2 * s2);
    corr *= 1.0 + (1.0 / 6.0) * lambda3 * h3 / rn;
  }
  return gauss * corr;
}

}  // namespace batchtail
