#include <cassert>
#include <cstdlib>
#include <string>

#include "kreinlab/kernels.hpp"

namespace kreinlab::kernels {
namespace {

const Table* select() {
  const char* forced = std::getenv("KREINLAB_SIMD");
  std::string want = forced ? forced : "";
  if (want == "scalar") return &scalar_table();
#if defined(KREINLAB_HAVE_AVX2)
  const bool has_avx2 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (has_avx2 && (want.empty() || want == "avx2")) return &avx2_table();
#endif
#if defined(KREINLAB_HAVE_NEON)
  if (want.empty() || want == "neon") return &neon_table();
#endif
  return &scalar_table();
}

}  // namespace

const Table& active() {
  static const Table* t = select();
  return *t;
}

std::vector<const Table*> available() {
  std::vector<const Table*> out{&scalar_table()};
#if defined(KREINLAB_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) out.push_back(&avx2_table());
#endif
#if defined(KREINLAB_HAVE_NEON)
  out.push_back(&neon_table());
#endif
  return out;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

double weighted_dot(std::span<const double> w, std::span<const double> u, std::span<const double> v) {
  assert(w.size() == u.size() && u.size() == v.size());
  return active().weighted_dot(w.data(), u.data(), v.data(), u.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void hadamard(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  assert(d.size() == x.size() && x.size() == y.size());
  active().hadamard(d.data(), x.data(), y.data(), x.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace kreinlab::kernels
