#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64 builds, an AVX2 version; the active table is chosen once at
// startup from CPUID and can be forced with REVMASK_SIMD=scalar|avx2.
//
// Elementwise kernels produce bit-identical results across variants.
// Reductions may differ in the last few ulps because of summation order.

namespace revmask::simd {

using cplx = std::complex<double>;

enum class Level { kScalar, kAvx2 };

std::string_view to_string(Level level);

struct KernelTable {
  Level level;

  // out[i] = a[i] * b[i]
  void (*multiply)(const double* a, const double* b, double* out,
                   std::size_t n);
  // sum a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum (a[i] - b[i])^2
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  // out[i] = a[i] * b[i] (complex)
  void (*complex_multiply)(const cplx* a, const cplx* b, cplx* out,
                           std::size_t n);
  // out[i] = |x[i]|^2
  void (*complex_norm)(const cplx* x, double* out, std::size_t n);
  // Radix-2 butterfly over one block: t = bottom[j] * tw[j];
  // bottom[j] = top[j] - t; top[j] = top[j] + t.
  void (*butterfly)(cplx* top, cplx* bottom, const cplx* tw, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build lacks AVX2 support or the CPU does not report it.
const KernelTable* avx2_table();

// Table selected for this process.
const KernelTable& active();

// Span conveniences over the active table.
void multiply(std::span<const double> a, std::span<const double> b,
              std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void complex_multiply(std::span<const cplx> a, std::span<const cplx> b,
                      std::span<cplx> out);
void complex_norm(std::span<const cplx> x, std::span<double> out);

}  // namespace revmask::simd
