#include <immintrin.h>

#include "revmask/simd/kernels.hpp"

// Built with -mavx2 and without FP contraction so the elementwise kernels
// round exactly like the scalar ones.

namespace revmask::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Two complex products per register: [ar*br - ai*bi, ar*bi + ai*br].
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_swap = _mm256_permute_pd(b, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(a_re, b), _mm256_mul_pd(a_im, b_swap));
}

void multiply_avx2(const double* a, const double* b, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                             _mm256_loadu_pd(b + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void complex_multiply_avx2(const cplx* a, const cplx* b, cplx* out,
                           std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(po + 2 * i, cmul(_mm256_loadu_pd(pa + 2 * i),
                                      _mm256_loadu_pd(pb + 2 * i)));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void complex_norm_avx2(const cplx* x, double* out, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(px + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(px + 2 * i + 4);
    const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(s, 0xD8));
  }
  for (; i < n; ++i) {
    const double re = x[i].real(), im = x[i].imag();
    out[i] = re * re + im * im;
  }
}

void butterfly_avx2(cplx* top, cplx* bottom, const cplx* tw, std::size_t n) {
  double* pt = reinterpret_cast<double*>(top);
  double* pb = reinterpret_cast<double*>(bottom);
  const double* pw = reinterpret_cast<const double*>(tw);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d t = cmul(_mm256_loadu_pd(pb + 2 * j), _mm256_loadu_pd(pw + 2 * j));
    const __m256d a = _mm256_loadu_pd(pt + 2 * j);
    _mm256_storeu_pd(pb + 2 * j, _mm256_sub_pd(a, t));
    _mm256_storeu_pd(pt + 2 * j, _mm256_add_pd(a, t));
  }
  for (; j < n; ++j) {
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

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      Level::kAvx2,          multiply_avx2,
      dot_avx2,              sum_squared_diff_avx2,
      complex_multiply_avx2, complex_norm_avx2,
      butterfly_avx2,
  };
  return table;
}

}  // namespace revmask::simd
