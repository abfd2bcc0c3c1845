#pragma once

#include <array>
#include <cstddef>

namespace batchtail {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Symmetric 3x3 matrix, dense storage.
struct Mat3 {
  double m[3][3]{};

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  static Mat3 identity();
};

double det3(const Mat3& a);
Mat3 inverse3(const Mat3& a);  // throws expansion_degenerate_error on singular input

/// Lower-triangular Cholesky factor; ok=false when the matrix is not positive definite.
struct Chol3 {
  double l[3][3]{};
  bool ok = false;
};
Chol3 cholesky3(const Mat3& a);

/// Eigenvalues of a symmetric 3x3 matrix, ascending (closed-form trigonometric method).
Vec3 sym3_eigenvalues(const Mat3& a);

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241, ~1e-15 accurate).
/// Odd-symmetric by construction: complementary double inputs map to negated outputs.
double inverse_normal_cdf(double p);

/// Zero-mean trivariate normal density with precomputed inverse/normalizer.
class MvNormal3 {
 public:
  MvNormal3() = default;
  MvNormal3(const Vec3& mean, const Mat3& cov);

  double pdf(const Vec3& x) const;
  /// mean + L * z for standard-normal z (Cholesky transport).
  Vec3 transport(const Vec3& z) const;

  const Vec3& mean() const { return mean_; }
  const Mat3& cov() const { return cov_; }

 private:
  Vec3 mean_{};
  Mat3 cov_{};
  Mat3 prec_{};       // inverse covariance
  Chol3 chol_{};
  double norm_ = 0;   // (2pi)^{-3/2} det^{-1/2}
};

}  // namespace batchtail
