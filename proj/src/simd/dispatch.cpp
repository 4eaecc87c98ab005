#include <cstdlib>
#include <iostream>
#include <string_view>

#include "revmask/simd/kernels.hpp"

namespace revmask::simd {

#if defined(REVMASK_HAVE_AVX2)
const KernelTable& avx2_kernels();  // kernels_avx2.cpp
#endif

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_table() {
#if defined(REVMASK_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select_table() {
  const char* forced = std::getenv("REVMASK_SIMD");
  const std::string_view want = forced ? forced : "";
  if (want == "scalar") return scalar_table();
  if (const KernelTable* avx2 = avx2_table()) return *avx2;
  if (want == "avx2") {
    std::cerr << "revmask: REVMASK_SIMD=avx2 requested but unavailable; "
                 "using scalar kernels\n";
  }
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select_table();
  return table;
}

void multiply(std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
  active().multiply(a.data(), b.data(), out.data(), out.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active().dot(a.data(), a.data(), a.size());
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  return active().sum_squared_diff(a.data(), b.data(), a.size());
}

void complex_multiply(std::span<const cplx> a, std::span<const cplx> b,
                      std::span<cplx> out) {
  active().complex_multiply(a.data(), b.data(), out.data(), out.size());
}

void complex_norm(std::span<const cplx> x, std::span<double> out) {
  active().complex_norm(x.data(), out.data(), out.size());
}

}  // namespace revmask::simd
