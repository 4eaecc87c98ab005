#include "revmask/simd/kernels.hpp"

namespace revmask::simd {
namespace {

void multiply_scalar(const double* a, const double* b, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squared_diff_scalar(const double* a, const double* b,
                               std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Written out by hand: std::complex operator* adds NaN/Inf recovery that the
// vector path does not replicate.
void complex_multiply_scalar(const cplx* a, const cplx* b, cplx* out,
                             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void complex_norm_scalar(const cplx* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = x[i].real(), im = x[i].imag();
    out[i] = re * re + im * im;
  }
}

void butterfly_scalar(cplx* top, cplx* bottom, const cplx* tw, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double br = bottom[j].real(), bi = bottom[j].imag();
    const double wr = tw[j].real(), wi = tw[j].imag();
    const double tr = br * wr - bi * wi;
    const double ti = br * wi + bi * wr;
    const double ar = top[j].real(), ai = top[j].imag();
    bottom[j] = cplx(ar - tr, ai - ti);
    top[j] = cplx(ar + tr, ai + ti);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Level::kScalar,          multiply_scalar,
      dot_scalar,              sum_squared_diff_scalar,
      complex_multiply_scalar, complex_norm_scalar,
      butterfly_scalar,
  };
  return table;
}

}  // namespace revmask::simd
