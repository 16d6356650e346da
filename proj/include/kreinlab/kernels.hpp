#pragma once

// Data-parallel inner loops shared by the radial operators.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on aarch64) are selected once at runtime from the CPU
// feature set; KREINLAB_SIMD=scalar|avx2|neon forces a particular table.
// Vector variants reassociate sums, so results agree with the scalar
// reference to rounding, not bit for bit.

#include <span>
#include <string_view>
#include <vector>

namespace kreinlab::kernels {

enum class Isa { scalar, avx2, neon };

struct Table {
  Isa isa;
  /// sum_i w_i * (u_i * v_i)
  double (*weighted_dot)(const double* w, const double* u, const double* v, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y_i = d_i * x_i
  void (*hadamard)(const double* d, const double* x, double* y, std::size_t n);
  /// y = T x for the symmetric tridiagonal T with diagonal `diag` (n) and
  /// off-diagonal `off` (n - 1).
  void (*tridiag_apply)(const double* diag, const double* off, const double* x, double* y,
                        std::size_t n);
  /// max_i |a_i - b_i|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const Table& scalar_table();
#if defined(KREINLAB_HAVE_AVX2)
const Table& avx2_table();
#endif
#if defined(KREINLAB_HAVE_NEON)
const Table& neon_table();
#endif

/// Table chosen for this process (CPU features + KREINLAB_SIMD override).
const Table& active();
/// Every table usable on this machine, scalar first.
std::vector<const Table*> available();
std::string_view isa_name(Isa isa);

// Span conveniences over the active table.
double weighted_dot(std::span<const double> w, std::span<const double> u, std::span<const double> v);
void axpy(double a, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> d, std::span<const double> x, std::span<double> y);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace kreinlab::kernels
