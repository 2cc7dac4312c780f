#pragma once

// Monte Carlo checks of the null behaviour of the statistic L and of the
// Fisher spectral law. Every replication draws from its own seed derived from
// the base seed, so results do not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fisherwatch/core.hpp"

namespace fisherwatch::validation {

/// SplitMix64 of base + index; independent streams for replications.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// p x n matrix of iid standard normals.
RowMatrix gaussian_matrix(std::size_t p, std::size_t n, std::uint64_t seed);

/// L for `reps` independent pairs of Gaussian samples with equal covariance,
/// computed from the plain unbiased sample covariances.
std::vector<double> null_statistics(std::size_t p, std::size_t n1, std::size_t n2,
                                    std::size_t reps, std::uint64_t seed, int kappa = 2,
                                    double beta1 = 0.0, double beta2 = 0.0);

/// Eigenvalues of one standard Fisher matrix built from Gaussian samples.
std::vector<double> standard_fisher_spectrum(std::size_t p, std::size_t n1, std::size_t n2,
                                             std::uint64_t seed);

/// sup_x |F_n(x) - cdf(x)| for the empirical distribution of `sample`.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

struct NullValidationConfig {
  std::size_t p = 80;
  std::size_t n1 = 240;
  std::size_t n2 = 240;
  std::size_t reps = 2000;
  double alpha = 0.01;
  int kappa = 2;
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::uint64_t seed = 20240101;
  std::size_t esd_p = 200;
  std::size_t esd_n1 = 1000;
  std::size_t esd_n2 = 1000;
};

struct NullCalibration {
  NullValidationConfig config;
  double mean_L = 0.0;
  double sd_L = 0.0;
  double threshold = 0.0;
  double empirical_size = 0.0;
  double ks_L_gaussian = 0.0;
  double ks_esd_lsd = 0.0;
};

/// Throws a Config error when reps < 100.
NullCalibration validate_null(const NullValidationConfig& cfg);

}  // namespace fisherwatch::validation
