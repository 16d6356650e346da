#include <arm_neon.h>

#include <cmath>

#include "kreinlab/kernels.hpp"

namespace kreinlab::kernels {
namespace {

double weighted_dot_neon(const double* w, const double* u, const double* v, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t p0 = vmulq_f64(vld1q_f64(u + i), vld1q_f64(v + i));
    float64x2_t p1 = vmulq_f64(vld1q_f64(u + i + 2), vld1q_f64(v + i + 2));
    acc0 = vfmaq_f64(acc0, vld1q_f64(w + i), p0);
    acc1 = vfmaq_f64(acc1, vld1q_f64(w + i + 2), p1);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += w[i] * (u[i] * v[i]);
  return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void hadamard_neon(const double* d, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(d + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = d[i] * x[i];
}

void tridiag_apply_neon(const double* diag, const double* off, const double* x, double* y,
                        std::size_t n) {
  if (n < 3) {
    scalar_table().tridiag_apply(diag, off, x, y, n);
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    float64x2_t r = vmulq_f64(vld1q_f64(off + i - 1), vld1q_f64(x + i - 1));
    r = vfmaq_f64(r, vld1q_f64(diag + i), vld1q_f64(x + i));
    r = vfmaq_f64(r, vld1q_f64(off + i), vld1q_f64(x + i + 1));
    vst1q_f64(y + i, r);
  }
  for (; i + 1 < n; ++i) y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

}  // namespace

const Table& neon_table() {
  static const Table t{Isa::neon,         weighted_dot_neon,  axpy_neon,
                       hadamard_neon,     tridiag_apply_neon, max_abs_diff_neon};
  return t;
}

}  // namespace kreinlab::kernels
