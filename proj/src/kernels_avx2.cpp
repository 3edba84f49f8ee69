// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be reached through the runtime dispatch in
// kernels.cpp after the CPUID check.

#if defined(WFUSION_HAVE_AVX2)

#include <immintrin.h>

#include "kernels_detail.hpp"

namespace wfusion::kernels::detail {

namespace {

// Two complex doubles per __m256d: [re0 im0 re1 im1].

inline __m256d cmul(__m256d a, __m256d b) {
  __m256d ar = _mm256_movedup_pd(a);        // [a0.re a0.re a1.re a1.re]
  __m256d ai = _mm256_permute_pd(a, 0xF);   // [a0.im a0.im a1.im a1.im]
  __m256d bs = _mm256_permute_pd(b, 0x5);   // [b0.im b0.re b1.im b1.re]
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// conj(a) * b
inline __m256d cmul_conj(__m256d a, __m256d b) {
  __m256d ar = _mm256_movedup_pd(a);
  __m256d ai = _mm256_permute_pd(a, 0xF);
  __m256d bs = _mm256_permute_pd(b, 0x5);
  return _mm256_fmsubadd_pd(ar, b, _mm256_mul_pd(ai, bs));
}

inline __m256d broadcast(cxd a) {
  return _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
}

inline cxd reduce_lanes(__m256d v) {
  // sum the two complex lanes
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double buf[2];
  _mm_store_pd(buf, s);
  return {buf[0], buf[1]};
}

void scale_avx2(cxd a, cxd* x, std::size_t n) {
  auto* p = reinterpret_cast<double*>(x);
  const __m256d av = broadcast(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    _mm256_storeu_pd(p + 2 * i, cmul(av, v));
  }
  for (; i < n; ++i) x[i] *= a;
}

void axpy_avx2(cxd a, const cxd* x, cxd* y, std::size_t n) {
  const auto* px = reinterpret_cast<const double*>(x);
  auto* py = reinterpret_cast<double*>(y);
  const __m256d av = broadcast(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(px + 2 * i);
    __m256d yv = _mm256_loadu_pd(py + 2 * i);
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(yv, cmul(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double norm_sq_avx2(const cxd* x, std::size_t n) {
  const auto* p = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double buf[4];
  _mm256_store_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

cxd dot_avx2(const cxd* x, const cxd* y, std::size_t n) {
  const auto* px = reinterpret_cast<const double*>(x);
  const auto* py = reinterpret_cast<const double*>(y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(px + 2 * i);
    __m256d yv = _mm256_loadu_pd(py + 2 * i);
    acc = _mm256_add_pd(acc, cmul_conj(xv, yv));
  }
  cxd s = reduce_lanes(acc);
  for (; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void matvec_avx2(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
  const auto* px = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const cxd* row = a + i * n;
    const auto* pr = reinterpret_cast<const double*>(row);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      __m256d rv = _mm256_loadu_pd(pr + 2 * j);
      __m256d xv = _mm256_loadu_pd(px + 2 * j);
      acc = _mm256_add_pd(acc, cmul(rv, xv));
    }
    cxd s = reduce_lanes(acc);
    for (; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

}  // namespace

const Vtable& avx2_vtable() {
  static const Vtable vt{scale_avx2, axpy_avx2, norm_sq_avx2, dot_avx2,
                         matvec_avx2};
  return vt;
}

}  // namespace wfusion::kernels::detail

#endif  // WFUSION_HAVE_AVX2
