#include "fisherwatch/rmt.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fisherwatch/core.hpp"

namespace fisherwatch::rmt {
namespace {

void require_ratio_domain(double y1, double y2) {
  if (!(y1 > 0.0) || !std::isfinite(y1)) {
    throw Error(ErrorCode::Domain, "y1 must be positive, got " + std::to_string(y1));
  }
  if (!(y2 > 0.0 && y2 < 1.0)) {
    throw Error(ErrorCode::Domain, "y2 must lie in (0, 1), got " + std::to_string(y2));
  }
}

// Integrand of the continuous part after x = a + (b - a) s, s = sin^2(theta).
double transformed_density(double theta, const LsdParams& lp) {
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  const double s = sn * sn;
  const double width = lp.b - lp.a;
  const double x = lp.a + width * s;
  const double num = (1.0 - lp.y2) * width * width * 2.0 * s * cs * cs;
  if (x <= 0.0) {
    // a == 0 and theta == 0: the s / x factor tends to 1 / width.
    return (1.0 - lp.y2) * width * 2.0 / (2.0 * std::numbers::pi * lp.y1);
  }
  return num / (2.0 * std::numbers::pi * x * (lp.y1 + lp.y2 * x));
}

}  // namespace

LsdParams support_edges(double y1, double y2) {
  require_ratio_domain(y1, y2);
  LsdParams lp;
  lp.y1 = y1;
  lp.y2 = y2;
  lp.h = std::sqrt(y1 + y2 - y1 * y2);
  const double denom = (1.0 - y2) * (1.0 - y2);
  lp.a = (1.0 - lp.h) * (1.0 - lp.h) / denom;
  lp.b = (1.0 + lp.h) * (1.0 + lp.h) / denom;
  lp.mass_at_zero = y1 > 1.0 ? 1.0 - 1.0 / y1 : 0.0;
  return lp;
}

double lsd_density(double x, const LsdParams& lp) {
  if (x < lp.a || x > lp.b || x <= 0.0) return 0.0;
  const double root = std::sqrt((lp.b - x) * (x - lp.a));
  return (1.0 - lp.y2) * root / (2.0 * std::numbers::pi * x * (lp.y1 + lp.y2 * x));
}

double lsd_cdf(double x, const LsdParams& lp) {
  if (x < 0.0) return 0.0;
  if (x <= lp.a) return lp.mass_at_zero;
  if (x >= lp.b) return 1.0;
  const double theta = std::asin(std::sqrt((x - lp.a) / (lp.b - lp.a)));
  auto f = [&lp](double t) { return transformed_density(t, lp); };
  const double part =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, theta, 20, 1e-12);
  const double value = lp.mass_at_zero + part;
  return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

CltConstants clt_constants(double y_tau, double y_T, int kappa, double beta1, double beta2) {
  require_ratio_domain(y_tau, y_T);
  if (kappa != 1 && kappa != 2) throw Error(ErrorCode::Domain, "kappa must be 1 or 2");

  const double y1 = y_tau;
  const double y2 = y_T;
  const double h2 = y1 + y2 - y1 * y2;
  const double one_m = 1.0 - y2;
  const double k = static_cast<double>(kappa);

  CltConstants c;
  c.y_tau = y_tau;
  c.y_T = y_T;
  c.kappa = kappa;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.Fg = (y1 + y2 - y1 * y2 + y2 * y2 - y2 * y2 * y2) / std::pow(one_m, 3);

  c.mu_g = (k - 1.0) * (2.0 * h2 * y2 + h2 - 2.0 * y2 * y2 * y2 + 3.0 * y2 * y2) /
               std::pow(one_m, 4) +
           beta1 * y1 / std::pow(one_m, 2) +
           beta2 * (-2.0 * y1 * y2 * y2 + 2.0 * y1 * y2 - 2.0 * y2 * y2 * y2 + 3.0 * y2 * y2 + y2) /
               std::pow(one_m, 3);

  const double inner = h2 - y2 * y2 + 2.0 * y2;
  const double inner_beta = h2 - y2 * y2 + y2;
  c.nu_g = k * (2.0 * h2 * h2 + 4.0 * h2 * inner * inner) / std::pow(one_m, 8) +
           4.0 * (beta1 * y1 + beta2 * y2) * inner_beta * inner_beta / std::pow(one_m, 6);
  if (!(c.nu_g > 0.0)) {
    throw Error(ErrorCode::Domain, "variance constant is not positive; check beta1, beta2");
  }
  return c;
}

double statistic_L(double trace_sq_dev, const CltConstants& c, std::size_t p) {
  return (trace_sq_dev - static_cast<double>(p) * c.Fg - c.mu_g) / std::sqrt(c.nu_g);
}

double statistic_L(const specstats::FisherSpectrum& spectrum, const CltConstants& c,
                   std::size_t p) {
  return statistic_L(spectrum.trace_sq_dev, c, p);
}

TestOutcome two_sided_test(double L, double alpha, std::size_t position) {
  TestOutcome out;
  out.L = L;
  out.threshold = gaussian_quantile(1.0 - alpha / 2.0);
  out.reject = std::fabs(L) >= out.threshold;
  out.position = position;
  return out;
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::Domain, "quantile level must lie in (0, 1)");
  }
  // Rational approximation (Acklam), relative error about 1e-9.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (q < plow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (q <= 1.0 - plow) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double r = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }

  // One Newton step on the distribution function.
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (pdf > 0.0) x -= (gaussian_cdf(x) - q) / pdf;
  return x;
}

double mp_upper_edge(double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw Error(ErrorCode::Domain, "aspect ratio must be non-negative");
  }
  const double r = 1.0 + std::sqrt(y);
  return r * r;
}

}  // namespace fisherwatch::rmt
