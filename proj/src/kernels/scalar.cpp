#include <cmath>

#include "fisherwatch/kernels.hpp"

namespace fisherwatch::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double centered_sumsq(const double* x, std::size_t n, double shift) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i] - shift;
    acc += v * v;
  }
  return acc;
}

void affine(const double* x, double* out, std::size_t n, double shift, double scale) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - shift) * scale;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

constexpr KernelTable kScalar{Isa::Scalar, dot, sum, centered_sumsq, affine, axpy, max_abs};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace fisherwatch::kernels
