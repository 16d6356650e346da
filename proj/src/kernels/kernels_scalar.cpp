#include "kreinlab/kernels.hpp"

#include <cmath>

namespace kreinlab::kernels {
namespace {

double weighted_dot_scalar(const double* w, const double* u, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * (u[i] * v[i]);
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void hadamard_scalar(const double* d, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void tridiag_apply_scalar(const double* diag, const double* off, const double* x, double* y,
                          std::size_t n) {
  if (n == 0) return;
  if (n == 1) {
    y[0] = diag[0] * x[0];
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i)
    y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Isa::scalar,         weighted_dot_scalar,  axpy_scalar,
                       hadamard_scalar,     tridiag_apply_scalar, max_abs_diff_scalar};
  return t;
}

}  // namespace kreinlab::kernels
