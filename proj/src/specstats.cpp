#include "fisherwatch/specstats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

#include "fisherwatch/kernels.hpp"

namespace fisherwatch::specstats {
namespace {

constexpr double kPivotTolerance = 1e-10;

// Constant rows leave only rounding noise after centering.
constexpr double kDegenerateRelative = 1e-13;

}  // namespace

RowMatrix normalize_rows(ConstBlock segment) {
  const auto n = static_cast<std::size_t>(segment.cols());
  if (n < 2) throw Error(ErrorCode::Shape, "normalization needs at least 2 samples per row");
  const auto& k = kernels::active();

  RowMatrix out(segment.rows(), segment.cols());
  for (Eigen::Index i = 0; i < segment.rows(); ++i) {
    const double* x = segment.row(i).data();
    const double mean = k.sum(x, n) / static_cast<double>(n);
    const double var = k.centered_sumsq(x, n, mean) / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    const double magnitude = k.max_abs(x, n);
    if (!(sd > kDegenerateRelative * magnitude)) {
      throw Error(ErrorCode::DegenerateChannel,
                  "channel " + std::to_string(i + 1) + " has zero sample variance");
    }
    k.affine(x, out.row(i).data(), n, mean, 1.0 / sd);
  }
  return out;
}

RowMatrix sample_covariance(ConstBlock data) {
  const auto n = static_cast<std::size_t>(data.cols());
  if (n < 2) throw Error(ErrorCode::Shape, "covariance needs at least 2 samples");
  const auto& k = kernels::active();
  const Eigen::Index p = data.rows();

  RowMatrix centered(p, data.cols());
  for (Eigen::Index i = 0; i < p; ++i) {
    const double* x = data.row(i).data();
    k.affine(x, centered.row(i).data(), n, k.sum(x, n) / static_cast<double>(n), 1.0);
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  RowMatrix s(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = k.dot(centered.row(i).data(), centered.row(j).data(), n) * scale;
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

RowMatrix cholesky_lower(const RowMatrix& spd) {
  const Eigen::Index p = spd.rows();
  if (p == 0 || spd.cols() != p) throw Error(ErrorCode::Shape, "Cholesky needs a square matrix");
  const auto& k = kernels::active();

  const double max_diag = spd.diagonal().cwiseAbs().maxCoeff();
  const double floor = kPivotTolerance * max_diag;
  RowMatrix l = RowMatrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double* lj = l.row(j).data();
    const double pivot = spd(j, j) - k.dot(lj, lj, static_cast<std::size_t>(j));
    if (!(pivot > floor)) {
      throw Error(ErrorCode::Singular,
                  "second-sample covariance is not positive definite (pivot " +
                      std::to_string(j + 1) + "); increase d2 or D well above p");
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      l(i, j) = (spd(i, j) - k.dot(l.row(i).data(), lj, static_cast<std::size_t>(j))) / ljj;
    }
  }
  return l;
}

namespace {

// Solves L X = B in place, row by row.
void forward_substitute(const RowMatrix& l, RowMatrix& b) {
  const auto& k = kernels::active();
  const auto cols = static_cast<std::size_t>(b.cols());
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    double* bi = b.row(i).data();
    for (Eigen::Index m = 0; m < i; ++m) {
      const double lim = l(i, m);
      if (lim != 0.0) k.axpy(-lim, b.row(m).data(), bi, cols);
    }
    const double inv = 1.0 / l(i, i);
    k.affine(bi, bi, cols, 0.0, inv);
  }
}

}  // namespace

RowMatrix whiten(const RowMatrix& s1, const RowMatrix& chol_s2) {
  RowMatrix y = s1;
  forward_substitute(chol_s2, y);  // y = L^{-1} S1
  RowMatrix c = y.transpose();     // S1 L^{-T}
  forward_substitute(chol_s2, c);  // L^{-1} S1 L^{-T}
  const RowMatrix sym = 0.5 * (c + c.transpose());
  return sym;
}

std::vector<double> symmetric_eigenvalues(const RowMatrix& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Domain, "symmetric eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

FisherSpectrum fisher_eigenvalues(const RowMatrix& s1, const RowMatrix& s2, std::size_t n1,
                                  std::size_t n2) {
  if (s1.rows() != s2.rows() || s1.rows() != s1.cols() || s2.rows() != s2.cols()) {
    throw Error(ErrorCode::Shape, "S1 and S2 must be square with equal dimension");
  }
  if (n1 < 2 || n2 < 2) throw Error(ErrorCode::Shape, "sample sizes must be at least 2");
  const double p = static_cast<double>(s1.rows());

  FisherSpectrum out;
  out.eigenvalues = symmetric_eigenvalues(whiten(s1, cholesky_lower(s2)));
  out.y_tau = p / static_cast<double>(n1 - 1);
  out.y_T = p / static_cast<double>(n2 - 1);
  double acc = 0.0;
  for (double lam : out.eigenvalues) acc += (lam - 1.0) * (lam - 1.0);
  out.trace_sq_dev = acc;
  return out;
}

double trace_sq_dev_direct(const RowMatrix& s1, const RowMatrix& s2) {
  RowMatrix c = whiten(s1, cholesky_lower(s2));
  c.diagonal().array() -= 1.0;
  const auto n = static_cast<std::size_t>(c.size());
  return kernels::active().dot(c.data(), c.data(), n);
}

double largest_eigenvalue(const FisherSpectrum& spectrum) {
  if (spectrum.eigenvalues.empty()) throw Error(ErrorCode::Shape, "empty spectrum");
  return *std::max_element(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
}

std::pair<RowMatrix, RowMatrix> normalized_split(ConstBlock block, const WindowSplit& split) {
  if (split.start < 1 || split.start - 1 + split.width() > static_cast<std::size_t>(block.cols())) {
    throw Error(ErrorCode::Shape, "window exceeds data block");
  }
  const auto c0 = static_cast<Eigen::Index>(split.start - 1);
  const auto n1 = static_cast<Eigen::Index>(split.n1);
  const auto n2 = static_cast<Eigen::Index>(split.n2);
  return {normalize_rows(block.middleCols(c0, n1)), normalize_rows(block.middleCols(c0 + n1, n2))};
}

std::pair<RowMatrix, RowMatrix> window_covariances(ConstBlock block, const WindowSplit& split) {
  auto [x1, x2] = normalized_split(block, split);
  return {sample_covariance(x1), sample_covariance(x2)};
}

}  // namespace fisherwatch::specstats
