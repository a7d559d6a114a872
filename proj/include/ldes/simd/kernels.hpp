#pragma once

// Dense double-precision kernels used by the simplex inner loops and the
// revenue reductions. Every kernel has a scalar reference implementation;
// AVX2 (x86-64) and NEON (aarch64) variants are compiled when the toolchain
// supports them and selected at runtime.
//
// Elementwise kernels (axpy, scale) are bitwise identical across variants.
// Reductions (dot, sum_squares, weighted_dot) reassociate the sum and agree
// with the scalar reference to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace ldes::simd {

enum class Isa { Scalar, Avx2, Neon };

struct Kernels {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y,
                         std::size_t n);
};

const Kernels& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// The kernel set used by the library. Chosen on first use: the best
// supported ISA, unless LDES_SIMD=scalar|avx2|neon overrides it.
const Kernels& active();

// Forces a kernel set. Returns false (and leaves the selection unchanged)
// when the requested ISA is unavailable.
bool select(Isa isa);

std::string_view isa_name(Isa isa);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void scale(double a, std::span<double> x) {
  active().scale(a, x.data(), x.size());
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> x,
                           std::span<const double> y) {
  return active().weighted_dot(w.data(), x.data(), y.data(), w.size());
}

}  // namespace ldes::simd
