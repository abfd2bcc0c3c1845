#pragma once

#include <array>
#include <span>

#include "batchtail/math.hpp"
#include "batchtail/noise.hpp"

namespace batchtail {

/// Index triple for the third-order Hermite tensor. Arm coordinates are 1 and 2;
/// 0 denotes the variance coordinate (the third axis of the stage vector).
struct HermiteIndex {
  int a = 1, b = 1, c = 1;
};

/// Covariance of the stage vector (z_dot_1, z_dot_2, z_ddot) given arm counts:
/// diag(sigma^2, sigma^2, mu4 - sigma^4) with sqrt(N_k/n) * mu3 in the third
/// row/column and zero between the arms.
Mat3 stage_covariance(const std::array<int, 2>& counts, int n, const MomentSet& moments,
                      double sigma2);

/// H_{abc}(z; V) = phi(z;0,V)^{-1} (-d_a)(-d_b)(-d_c) phi(z;0,V).
/// With zeta = V^{-1} z and P = V^{-1}:
///   H_abc = zeta_a zeta_b zeta_c - zeta_a P_bc - zeta_b P_ac - zeta_c P_ab.
double hermite3(const Vec3& z, const Mat3& v, const HermiteIndex& idx);

/// First-order signed expansion density for one stage, with everything that does
/// not depend on z precomputed at construction.
///
/// psi(z) = phi(z;0,V) * [1 + (1/6) { sum_k N_k^{-1/2} mu3 H_kkk
///                                  + 3 n^{-1/2} (mu4 - s^4) sum_k H_kk0
///                                  + 3 n^{-1} (mu5 - 2 s^2 mu3) sum_k N_k^{1/2} H_k00
///                                  + n^{-1/2} (mu6 - 3 s^2 mu4 + 2 s^6) H_000 } ]
///
/// order = 0 keeps only the Gaussian factor; reduced drops the mu5/mu6 terms.
class ExpansionMeasure {
 public:
  ExpansionMeasure(int n, const std::array<int, 2>& counts, const MomentSet& moments,
                   double sigma2, int order = 1, bool reduced = false);

  /// Signed density at z = (z_1, z_2, z_0).
  double density(const Vec3& z) const;

  /// Density of the sigma-normalized coordinates y = (z_dot/sigma, z_ddot/sigma^2):
  /// psi~(y) = sigma^4 * psi(sigma*y_dot, sigma^2*y_ddot).
  double transformed_density(const Vec3& y) const;

  const Mat3& covariance() const { return v_; }
  /// Covariance of the transformed coordinates y.
  Mat3 transformed_covariance() const;

  int n() const { return n_; }
  const std::array<int, 2>& counts() const { return counts_; }
  double sigma() const { return sigma_; }
  /// True when an ill-conditioned V forced the order-0 regularized fallback.
  bool fallback() const { return fallback_; }

 private:
  int n_;
  std::array<int, 2> counts_;
  double sigma_;
  int order_;
  Mat3 v_{};
  Mat3 prec_{};
  double norm_ = 0.0;  // (2pi)^{-3/2} det(V)^{-1/2}
  bool fallback_ = false;
  // Correction coefficients, already carrying their 1/6 and n-power factors.
  double c_kkk_[2]{};  // multiplies H_kkk
  double c_kk0_ = 0.0;
  double c_k00_[2]{};
  double c_000_ = 0.0;
};

/// Product-form first-order density for a linear functional of the stage sums:
///   prod_k phi(z_k; sigma^2) * prod_k [1 + (1/6) n^{-1/2} lambda_k h3(z_k; sigma^2)]
/// with lambda_k = g_k^3 * (N_k/n)^{-1/2} * mu3 and g_k the per-arm weight
/// evaluated at N_k/n.
double linear_expansion_density(std::span<const double> z, std::span<const double> g_at_counts,
                                std::span<const int> counts, int n, const MomentSet& moments);

}  // namespace batchtail
