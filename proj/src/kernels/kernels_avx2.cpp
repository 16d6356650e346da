// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kreinlab/kernels.hpp"

namespace kreinlab::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double weighted_dot_avx2(const double* w, const double* u, const double* v, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // u*v first so that swapping u and v is exact.
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(v + i));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(u + i + 4), _mm256_loadu_pd(v + i + 4));
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), p0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), p1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(v + i));
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), p, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += w[i] * (u[i] * v[i]);
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void hadamard_avx2(const double* d, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = d[i] * x[i];
}

void tridiag_apply_avx2(const double* diag, const double* off, const double* x, double* y,
                        std::size_t n) {
  if (n < 3) {
    scalar_table().tridiag_apply(diag, off, x, y, n);
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d r = _mm256_mul_pd(_mm256_loadu_pd(off + i - 1), _mm256_loadu_pd(x + i - 1));
    r = _mm256_fmadd_pd(_mm256_loadu_pd(diag + i), _mm256_loadu_pd(x + i), r);
    r = _mm256_fmadd_pd(_mm256_loadu_pd(off + i), _mm256_loadu_pd(x + i + 1), r);
    _mm256_storeu_pd(y + i, r);
  }
  for (; i + 1 < n; ++i) y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

}  // namespace

const Table& avx2_table() {
  static const Table t{Isa::avx2,         weighted_dot_avx2,  axpy_avx2,
                       hadamard_avx2,     tridiag_apply_avx2, max_abs_diff_avx2};
  return t;
}

}  // namespace kreinlab::kernels
