#include "fisherwatch/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fisherwatch/parallel.hpp"
#include "fisherwatch/rmt.hpp"
#include "fisherwatch/specstats.hpp"

namespace fisherwatch::validation {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RowMatrix gaussian_matrix(std::size_t p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
  }
  return m;
}

std::vector<double> null_statistics(std::size_t p, std::size_t n1, std::size_t n2,
                                    std::size_t reps, std::uint64_t seed, int kappa,
                                    double beta1, double beta2) {
  const auto consts = rmt::clt_constants(static_cast<double>(p) / static_cast<double>(n1 - 1),
                                         static_cast<double>(p) / static_cast<double>(n2 - 1),
                                         kappa, beta1, beta2);
  std::vector<double> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(seed, r);
    const RowMatrix s1 = specstats::sample_covariance(gaussian_matrix(p, n1, derive_seed(s, 0)));
    const RowMatrix s2 = specstats::sample_covariance(gaussian_matrix(p, n2, derive_seed(s, 1)));
    out[r] = rmt::statistic_L(specstats::trace_sq_dev_direct(s1, s2), consts, p);
  });
  return out;
}

std::vector<double> standard_fisher_spectrum(std::size_t p, std::size_t n1, std::size_t n2,
                                             std::uint64_t seed) {
  const RowMatrix s1 = specstats::sample_covariance(gaussian_matrix(p, n1, derive_seed(seed, 0)));
  const RowMatrix s2 = specstats::sample_covariance(gaussian_matrix(p, n2, derive_seed(seed, 1)));
  return specstats::fisher_eigenvalues(s1, s2, n1, n2).eigenvalues;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    worst = std::max({worst, std::fabs(static_cast<double>(i + 1) / n - f),
                      std::fabs(f - static_cast<double>(i) / n)});
  }
  return worst;
}

NullCalibration validate_null(const NullValidationConfig& cfg) {
  if (cfg.reps < 100) throw Error(ErrorCode::Config, "at least 100 replications are required");
  if (cfg.n1 < 2 || cfg.n2 <= cfg.p + 1 || cfg.esd_n2 <= cfg.esd_p + 1 || cfg.esd_n1 < 2) {
    throw Error(ErrorCode::Config, "sample sizes too small for the requested dimension");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw Error(ErrorCode::Config, "alpha must lie in (0, 1)");
  }

  NullCalibration out;
  out.config = cfg;
  const auto ls = null_statistics(cfg.p, cfg.n1, cfg.n2, cfg.reps, derive_seed(cfg.seed, 0),
                                  cfg.kappa, cfg.beta1, cfg.beta2);
  const double n = static_cast<double>(ls.size());
  out.mean_L = std::accumulate(ls.begin(), ls.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : ls) ss += (v - out.mean_L) * (v - out.mean_L);
  out.sd_L = std::sqrt(ss / (n - 1.0));
  out.threshold = rmt::gaussian_quantile(1.0 - cfg.alpha / 2.0);
  const auto rejected = std::count_if(ls.begin(), ls.end(),
                                      [&](double v) { return std::fabs(v) >= out.threshold; });
  out.empirical_size = static_cast<double>(rejected) / n;
  out.ks_L_gaussian = ks_distance(ls, rmt::gaussian_cdf);

  const auto spectrum =
      standard_fisher_spectrum(cfg.esd_p, cfg.esd_n1, cfg.esd_n2, derive_seed(cfg.seed, 1));
  const auto lsd = rmt::support_edges(
      static_cast<double>(cfg.esd_p) / static_cast<double>(cfg.esd_n1 - 1),
      static_cast<double>(cfg.esd_p) / static_cast<double>(cfg.esd_n2 - 1));
  out.ks_esd_lsd = ks_distance(spectrum, [&lsd](double x) { return rmt::lsd_cdf(x, lsd); });
  return out;
}

}  // namespace fisherwatch::validation
