#include "batchtail/math.hpp"

#include <cmath>

#include "batchtail/errors.hpp"

namespace batchtail {

Mat3 Mat3::identity() {
  Mat3 a;
  a.m[0][0] = a.m[1][1] = a.m[2][2] = 1.0;
  return a;
}

double det3(const Mat3& a) {
  return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
         a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
         a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

Mat3 inverse3(const Mat3& a) {
  const double det = det3(a);
  if (det == 0.0 || !std::isfinite(det)) {
    throw expansion_degenerate_error("singular 3x3 matrix");
  }
  Mat3 r;
  r.m[0][0] = (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) / det;
  r.m[0][1] = (a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2]) / det;
  r.m[0][2] = (a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1]) / det;
  r.m[1][0] = (a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2]) / det;
  r.m[1][1] = (a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0]) / det;
  r.m[1][2] = (a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2]) / det;
  r.m[2][0] = (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]) / det;
  r.m[2][1] = (a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1]) / det;
  r.m[2][2] = (a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]) / det;
  return r;
}

Chol3 cholesky3(const Mat3& a) {
  Chol3 c;
  double l00s = a.m[0][0];
  if (l00s <= 0) return c;
  c.l[0][0] = std::sqrt(l00s);
  c.l[1][0] = a.m[1][0] / c.l[0][0];
  c.l[2][0] = a.m[2][0] / c.l[0][0];
  double l11s = a.m[1][1] - c.l[1][0] * c.l[1][0];
  if (l11s <= 0) return c;
  c.l[1][1] = std::sqrt(l11s);
  c.l[2][1] = (a.m[2][1] - c.l[2][0] * c.l[1][0]) / c.l[1][1];
  double l22s = a.m[2][2] - c.l[2][0] * c.l[2][0] - c.l[2][1] * c.l[2][1];
  if (l22s <= 0) return c;
  c.l[2][2] = std::sqrt(l22s);
  c.ok = true;
  return c;
}

Vec3 sym3_eigenvalues(const Mat3& a) {
  // Trigonometric closed form for symmetric 3x3 (Smith's method).
  const double p1 = a.m[0][1] * a.m[0][1] + a.m[0][2] * a.m[0][2] + a.m[1][2] * a.m[1][2];
  const double tr = a.m[0][0] + a.m[1][1] + a.m[2][2];
  if (p1 == 0.0) {
    Vec3 ev{a.m[0][0], a.m[1][1], a.m[2][2]};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
  }
  const double q = tr / 3.0;
  const double p2 = (a.m[0][0] - q) * (a.m[0][0] - q) + (a.m[1][1] - q) * (a.m[1][1] - q) +
                    (a.m[2][2] - q) * (a.m[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b.m[i][j] = (a.m[i][j] - (i == j ? q : 0.0)) / p;
  double r = det3(b) / 2.0;
  r = std::fmax(-1.0, std::fmin(1.0, r));
  const double phi = std::acos(r) / 3.0;
  const double e2 = q + 2.0 * p * std::cos(phi);
  const double e0 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e1 = tr - e0 - e2;
  return Vec3{e0, e1, e2};
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// AS241 PPND16 rational approximations; argument is p in (0, 0.5].
double ppnd16_lower(double p) {
  const double q = p - 0.5;  // <= 0 here
  if (q >= -0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = std::sqrt(-std::log(p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return -x;
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw parameter_error("inverse_normal_cdf: p must lie in (0,1)");
  }
  if (p == 0.5) return 0.0;
  // Route both tails through the lower-tail kernel so that exact complements
  // (q, 1-q computed in double) produce exactly negated results.
  if (p > 0.5) return -ppnd16_lower(1.0 - p);
  return ppnd16_lower(p);
}

MvNormal3::MvNormal3(const Vec3& mean, const Mat3& cov) : mean_(mean), cov_(cov) {
  chol_ = cholesky3(cov);
  if (!chol_.ok) throw expansion_degenerate_error("MvNormal3: covariance not positive definite");
  const double det = det3(cov);
  prec_ = inverse3(cov);
  norm_ = std::pow(2.0 * M_PI, -1.5) / std::sqrt(det);
}

double MvNormal3::pdf(const Vec3& x) const {
  const double d0 = x[0] - mean_[0], d1 = x[1] - mean_[1], d2 = x[2] - mean_[2];
  const double q = d0 * (prec_.m[0][0] * d0 + prec_.m[0][1] * d1 + prec_.m[0][2] * d2) +
                   d1 * (prec_.m[1][0] * d0 + prec_.m[1][1] * d1 + prec_.m[1][2] * d2) +
                   d2 * (prec_.m[2][0] * d0 + prec_.m[2][1] * d1 + prec_.m[2][2] * d2);
  return norm_ * std::exp(-0.5 * q);
}

Vec3 MvNormal3::transport(const Vec3& z) const {
  return Vec3{mean_[0] + chol_.l[0][0] * z[0],
              mean_[1] + chol_.l[1][0] * z[0] + chol_.l[1][1] * z[1],
              mean_[2] + chol_.l[2][0] * z[0] + chol_.l[2][1] * z[1] + chol_.l[2][2] * z[2]};
}

}  // namespace batchtail
