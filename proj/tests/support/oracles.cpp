#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

Rule1d gauss_hermite(int n) {
  Rule1d r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const double eps = 1e-14;
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.x[1];
    } else {
      z = 2.0 * z - r.x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = std::pow(M_PI, -0.25);
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    r.x[i] = z;
    r.x[n - 1 - i] = -z;
    r.w[i] = 2.0 / (pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

Rule1d gauss_legendre(int n, double a, double b) {
  Rule1d r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    r.x[i] = xm - xl * z;
    r.x[n - 1 - i] = xm + xl * z;
    r.w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

double integrate_r3(const std::function<double(const Vec3&)>& f, const Mat3& cov, int n) {
  // Substitute z = sqrt(2) L t against weight exp(-|t|^2); the Gaussian factor
  // of the integrand is handled by the rule, everything else by evaluation.
  const batchtail::Chol3 ch = batchtail::cholesky3(cov);
  if (!ch.ok) throw std::runtime_error("integrate_r3: covariance not PD");
  const Rule1d gh = gauss_hermite(n);
  const double s2 = std::sqrt(2.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double t0 = gh.x[i], t1 = gh.x[j], t2 = gh.x[k];
        const Vec3 z{s2 * ch.l[0][0] * t0,
                     s2 * (ch.l[1][0] * t0 + ch.l[1][1] * t1),
                     s2 * (ch.l[2][0] * t0 + ch.l[2][1] * t1 + ch.l[2][2] * t2)};
        const double q = t0 * t0 + t1 * t1 + t2 * t2;
        // f includes its own Gaussian; divide it out and let the rule supply it.
        acc += gh.w[i] * gh.w[j] * gh.w[k] * f(z) * std::exp(q);
      }
    }
  }
  const double det_l = ch.l[0][0] * ch.l[1][1] * ch.l[2][2];
  return acc * std::pow(2.0, 1.5) * det_l;
}

double integrate_r3_poly(const std::function<double(const Vec3&)>& g, const Mat3& cov, int n) {
  const batchtail::Chol3 ch = batchtail::cholesky3(cov);
  if (!ch.ok) throw std::runtime_error("integrate_r3_poly: covariance not PD");
  const Rule1d gh = gauss_hermite(n);
  const double s2 = std::sqrt(2.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Vec3 z{s2 * ch.l[0][0] * gh.x[i],
                     s2 * (ch.l[1][0] * gh.x[i] + ch.l[1][1] * gh.x[j]),
                     s2 * (ch.l[2][0] * gh.x[i] + ch.l[2][1] * gh.x[j] + ch.l[2][2] * gh.x[k])};
        acc += gh.w[i] * gh.w[j] * gh.w[k] * g(z);
      }
    }
  }
  return acc * std::pow(M_PI, -1.5);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, int panels,
                    int nodes) {
  const Rule1d base = gauss_legendre(nodes, 0.0, 1.0);
  const double width = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < nodes; ++i) acc += base.w[i] * width * f(lo + base.x[i] * width);
  }
  return acc;
}

namespace {

double phi3(const Vec3& z, const Mat3& cov) {
  const Mat3 prec = batchtail::inverse3(cov);
  double q = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q += z[i] * prec.m[i][j] * z[j];
  return std::pow(2.0 * M_PI, -1.5) / std::sqrt(batchtail::det3(cov)) * std::exp(-0.5 * q);
}

double central_diff(const std::function<double(Vec3)>& f, Vec3 z, std::vector<int> axes,
                    double h) {
  if (axes.empty()) return f(z);
  const int a = axes.back();
  axes.pop_back();
  Vec3 zp = z, zm = z;
  zp[a] += 0.5 * h;
  zm[a] -= 0.5 * h;
  return (central_diff(f, zp, axes, h) - central_diff(f, zm, axes, h)) / h;
}

}  // namespace

double fd_hermite3(const Vec3& z, const Mat3& cov, int a, int b, int c, double h) {
  const auto f = [&](Vec3 p) { return phi3(p, cov); };
  const double d_h = central_diff(f, z, {a, b, c}, h);
  const double d_h2 = central_diff(f, z, {a, b, c}, 0.5 * h);
  const double d = (4.0 * d_h2 - d_h) / 3.0;  // Richardson, O(h^4)
  return -d / phi3(z, cov);
}

double assembled_density(const Vec3& z, int n, const std::array<int, 2>& counts,
                         const MomentSet& mom, double sigma2, bool reduced) {
  const Mat3 v = batchtail::stage_covariance(counts, n, mom, sigma2);
  const double rn = std::sqrt(static_cast<double>(n));
  const double s2 = sigma2;

  // Raw third-cumulant tensor of (z_dot_1, z_dot_2, z_ddot); storage axis 2 is
  // the variance coordinate.
  double kappa[3][3][3] = {};
  for (int k = 0; k < 2; ++k) {
    const double nk = counts[k];
    kappa[k][k][k] = mom.mu3 / std::sqrt(nk);
    const double kk0 = (mom.mu4 - s2 * s2) / rn;
    kappa[k][k][2] = kappa[k][2][k] = kappa[2][k][k] = kk0;
    if (!reduced) {
      const double k00 = std::sqrt(nk) / n * (mom.mu5 - 2.0 * s2 * mom.mu3);
      kappa[k][2][2] = kappa[2][k][2] = kappa[2][2][k] = k00;
    }
  }
  if (!reduced) {
    kappa[2][2][2] = (mom.mu6 - 3.0 * s2 * mom.mu4 + 2.0 * s2 * s2 * s2) / rn;
  }

  // Storage axis -> paper coordinate label {1, 2, 0}.
  const int label[3] = {1, 2, 0};
  double corr = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        if (kappa[a][b][c] == 0.0) continue;
        corr += kappa[a][b][c] *
                batchtail::hermite3(z, v, {label[a], label[b], label[c]});
      }
    }
  }
  return phi3(z, v) * (1.0 + corr / 6.0);
}

MomentSet mixture_moments_quadrature(double weight, double mean1, double var1, double mean2,
                                     double var2) {
  const double sd1 = std::sqrt(var1), sd2 = std::sqrt(var2);
  const double lo = std::min(mean1 - 14.0 * sd1, mean2 - 14.0 * sd2);
  const double hi = std::max(mean1 + 14.0 * sd1, mean2 + 14.0 * sd2);
  const auto dens = [&](double x) {
    const double p1 = std::exp(-0.5 * (x - mean1) * (x - mean1) / var1) /
                      (sd1 * std::sqrt(2.0 * M_PI));
    const double p2 = std::exp(-0.5 * (x - mean2) * (x - mean2) / var2) /
                      (sd2 * std::sqrt(2.0 * M_PI));
    return weight * p1 + (1.0 - weight) * p2;
  };
  const auto raw = [&](int r) {
    return integrate_1d([&](double x) { return std::pow(x, r) * dens(x); }, lo, hi, 600);
  };
  const double mu = raw(1);
  const double var = raw(2) - mu * mu;
  const double sd = std::sqrt(var);
  const auto std_moment = [&](int r) {
    return integrate_1d([&](double x) { return std::pow((x - mu) / sd, r) * dens(x); }, lo, hi,
                        600);
  };
  return MomentSet{1.0, std_moment(3), std_moment(4), std_moment(5), std_moment(6)};
}

MomentSet gamma_moments_quadrature(double shape, double scale) {
  const double mean = shape * scale;
  const double sd = scale * std::sqrt(shape);
  const double hi = mean + 60.0 * sd;
  const auto dens = [&](double x) {
    return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                    shape * std::log(scale));
  };
  const auto std_moment = [&](int r) {
    return integrate_1d([&](double x) { return std::pow((x - mean) / sd, r) * dens(x); }, 1e-12,
                        hi, 2000);
  };
  return MomentSet{1.0, std_moment(3), std_moment(4), std_moment(5), std_moment(6)};
}

}  // namespace oracles
