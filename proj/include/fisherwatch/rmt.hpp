#pragma once

// Closed-form random-matrix laws for the Fisher matrix: limiting spectral
// density and its support, the centering and scaling constants of the
// linear spectral statistic tr{(F - I)^2}, and the Gaussian and
// Marchenko-Pastur thresholds used by the detectors.

#include <cstddef>

#include "fisherwatch/specstats.hpp"

namespace fisherwatch::rmt {

/// Limiting spectral law of a standard Fisher matrix with ratios (y1, y2).
struct LsdParams {
  double y1 = 0.0;
  double y2 = 0.0;
  double h = 0.0;  // sqrt(y1 + y2 - y1 y2)
  double a = 0.0;  // (1 - h)^2 / (1 - y2)^2
  double b = 0.0;  // (1 + h)^2 / (1 - y2)^2
  double mass_at_zero = 0.0;  // 1 - 1/y1 when y1 > 1
};

/// Requires y1 > 0 and 0 < y2 < 1.
LsdParams support_edges(double y1, double y2);

/// Density of the continuous part; zero outside [a, b].
double lsd_density(double x, const LsdParams& params);

/// Distribution function: point mass at the origin plus the integrated
/// density. The edge singularities are removed by x = a + (b - a) sin^2(t)
/// before adaptive Gauss-Kronrod quadrature.
double lsd_cdf(double x, const LsdParams& params);

struct CltConstants {
  double y_tau = 0.0;
  double y_T = 0.0;
  double Fg = 0.0;    // integral of (x - 1)^2 against the limiting law
  double mu_g = 0.0;  // mean shift
  double nu_g = 0.0;  // variance
  int kappa = 2;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Constants for g(x) = (x - 1)^2 with the finite-sample ratios plugged in
/// for the limits. kappa = 2 for real data, 1 for complex.
CltConstants clt_constants(double y_tau, double y_T, int kappa = 2, double beta1 = 0.0,
                           double beta2 = 0.0);

/// L = (tr{(F - I)^2} - p Fg - mu_g) / sqrt(nu_g).
double statistic_L(double trace_sq_dev, const CltConstants& consts, std::size_t p);
double statistic_L(const specstats::FisherSpectrum& spectrum, const CltConstants& consts,
                   std::size_t p);

/// Two-sided test at level alpha; reject iff |L| >= U_{1 - alpha/2}.
struct TestOutcome {
  double L = 0.0;
  double threshold = 0.0;
  bool reject = false;
  std::size_t position = 0;
};

TestOutcome two_sided_test(double L, double alpha, std::size_t position = 0);

double gaussian_cdf(double x);

/// Standard normal quantile for q in (0, 1), absolute error below 1e-8.
double gaussian_quantile(double q);

/// Upper edge (1 + sqrt(y))^2 of the Marchenko-Pastur law with unit variance.
double mp_upper_edge(double y);

}  // namespace fisherwatch::rmt
