#pragma once

// Inner-loop arithmetic used by the window statistics. Each instruction set
// provides the same table of functions; the best one supported by the running
// CPU is chosen on first use. The scalar table is the reference every other
// variant is tested against.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace fisherwatch::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // sum_i (x[i] - shift)^2
  double (*centered_sumsq)(const double* x, std::size_t n, double shift);
  // out[i] = (x[i] - shift) * scale; out may alias x
  void (*affine)(const double* x, double* out, std::size_t n, double shift, double scale);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Tables compiled into this binary and runnable on this CPU, scalar first.
std::vector<const KernelTable*> available_tables();

/// The table in use. Selected once: FISHERWATCH_ISA=scalar|avx2|neon forces
/// a choice, otherwise the widest supported variant wins.
const KernelTable& active() noexcept;

/// Overrides the active table; returns false if `isa` is not available.
bool select(Isa isa) noexcept;

// Tables defined in the per-ISA translation units; null when not built.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

}  // namespace fisherwatch::kernels
