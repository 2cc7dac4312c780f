#pragma once

// Per-window statistics: row normalization, unbiased sample covariances and
// the spectrum of the Fisher matrix F = S1 * S2^{-1}.

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fisherwatch/core.hpp"

namespace fisherwatch::specstats {

using ConstBlock = Eigen::Ref<const RowMatrix>;

/// A window inside a data block: sub-sample 1 is columns
/// [start, start + n1 - 1], sub-sample 2 the following n2 columns.
/// `start` is 1-based relative to the block.
struct WindowSplit {
  std::size_t start = 1;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  std::size_t width() const noexcept { return n1 + n2; }
  bool operator==(const WindowSplit&) const = default;
};

struct FisherSpectrum {
  std::vector<double> eigenvalues;  // descending, length p
  double y_tau = 0.0;               // p / (n1 - 1)
  double y_T = 0.0;                 // p / (n2 - 1)
  double trace_sq_dev = 0.0;        // tr{(F - I)^2}

  std::size_t dimension() const noexcept { return eigenvalues.size(); }
};

/// Each row shifted to mean 0 and scaled to unit sample variance (divisor
/// n - 1). Throws DegenerateChannel for a constant row.
RowMatrix normalize_rows(ConstBlock segment);

/// S = (1/(n-1)) sum_k (x_k - xbar)(x_k - xbar)^T over the columns x_k.
RowMatrix sample_covariance(ConstBlock data);

/// Lower Cholesky factor. A pivot at or below 1e-10 times the largest
/// diagonal entry raises a Singular error.
RowMatrix cholesky_lower(const RowMatrix& spd);

/// C = L^{-1} S1 L^{-T} where S2 = L L^T. C is similar to S1 * S2^{-1}.
RowMatrix whiten(const RowMatrix& s1, const RowMatrix& chol_s2);

/// Spectrum of S1 * S2^{-1} via the generalized symmetric-definite problem
/// S1 v = lambda S2 v. n1 and n2 are the sample sizes behind S1 and S2.
FisherSpectrum fisher_eigenvalues(const RowMatrix& s1, const RowMatrix& s2, std::size_t n1,
                                  std::size_t n2);

/// tr{(F - I)^2} = ||C - I||_F^2 without an eigendecomposition.
double trace_sq_dev_direct(const RowMatrix& s1, const RowMatrix& s2);

double largest_eigenvalue(const FisherSpectrum& spectrum);

/// Eigenvalues of a symmetric matrix, descending.
std::vector<double> symmetric_eigenvalues(const RowMatrix& sym);

/// Normalized sub-samples of one window, each normalized with its own row
/// statistics.
std::pair<RowMatrix, RowMatrix> normalized_split(ConstBlock block, const WindowSplit& split);

/// Covariances of the normalized sub-samples of one window.
std::pair<RowMatrix, RowMatrix> window_covariances(ConstBlock block, const WindowSplit& split);

}  // namespace fisherwatch::specstats
