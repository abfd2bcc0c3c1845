#pragma once

// Test-only oracles, kept independent of the library's evaluation paths:
// quadrature rules, finite-difference derivatives, and a from-scratch
// assembly of the stage expansion density out of its raw cumulant tensor.

#include <functional>
#include <utility>
#include <vector>

#include "batchtail/edgeworth.hpp"
#include "batchtail/math.hpp"
#include "batchtail/noise.hpp"

namespace oracles {

using batchtail::Mat3;
using batchtail::MomentSet;
using batchtail::Vec3;

struct Rule1d {
  std::vector<double> x;
  std::vector<double> w;
};

/// Physicists' Gauss-Hermite rule (weight exp(-x^2)); sum of weights = sqrt(pi).
Rule1d gauss_hermite(int n);

/// Gauss-Legendre rule on [a, b].
Rule1d gauss_legendre(int n, double a, double b);

/// Integral of f over R^3 against no weight, using an n-node Gauss-Hermite
/// product rule matched to the Gaussian factor N(0, cov): exact for
/// polynomial-times-phi integrands of degree <= 2n-1.
double integrate_r3(const std::function<double(const Vec3&)>& f, const Mat3& cov, int n = 20);

/// Same with an explicit integrand factorization f(z) = g(z) * phi(z; 0, cov).
double integrate_r3_poly(const std::function<double(const Vec3&)>& g, const Mat3& cov,
                         int n = 20);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    int panels = 400, int nodes = 16);

/// Third mixed derivative ratio (-1)^3 d_a d_b d_c phi / phi by Richardson-
/// extrapolated central differences; axes in {0,1,2} storage order.
double fd_hermite3(const Vec3& z, const Mat3& cov, int a, int b, int c, double h = 2e-2);

/// Expansion density assembled from the raw third-cumulant tensor of the stage
/// vector: phi(z;V) * (1 + (1/6) sum_{abc} kappa[a][b][c] H_abc(z;V)) over all
/// 27 index triples. Independent of the grouped-coefficient implementation.
double assembled_density(const Vec3& z, int n, const std::array<int, 2>& counts,
                         const MomentSet& mom, double sigma2, bool reduced = false);

/// Raw moments of the standardized two-component normal mixture by quadrature.
MomentSet mixture_moments_quadrature(double weight, double mean1, double var1, double mean2,
                                     double var2);

/// Standardized gamma moments by quadrature of the density.
MomentSet gamma_moments_quadrature(double shape, double scale);

}  // namespace oracles
