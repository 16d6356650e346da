#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kreinlab/kernels.hpp"

using namespace kreinlab;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto tables = kernels::available();
  REQUIRE_FALSE(tables.empty());
  CHECK(tables.front()->isa == kernels::Isa::scalar);
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  bool active_listed = false;
  for (const auto* t : tables) active_listed = active_listed || t == &kernels::active();
  CHECK(active_listed);
}

TEST_CASE("scalar kernels match hand-computed values") {
  const auto& s = kernels::scalar_table();
  const double w[] = {1.0, 2.0, 3.0}, u[] = {1.0, -1.0, 2.0}, v[] = {4.0, 5.0, 6.0};
  CHECK(s.weighted_dot(w, u, v, 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 12));
  double y[] = {1.0, 1.0, 1.0};
  s.axpy(2.0, u, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == -1.0);
  CHECK(y[2] == 5.0);
  double z[3];
  s.hadamard(w, v, z, 3);
  CHECK(z[2] == 18.0);
  // T = tridiag(off, diag, off) applied to u.
  const double diag[] = {2.0, 2.0, 2.0}, off[] = {-1.0, -1.0};
  s.tridiag_apply(diag, off, u, z, 3);
  CHECK(z[0] == doctest::Approx(2 * 1 - (-1)));
  CHECK(z[1] == doctest::Approx(-1 + 2 * -1 - 2));
  CHECK(z[2] == doctest::Approx(-(-1) + 4));
  CHECK(s.max_abs_diff(u, v, 3) == 6.0);
}

TEST_CASE("every vector table agrees with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = kernels::scalar_table();
  for (const auto* t : kernels::available()) {
    CAPTURE(kernels::isa_name(t->isa));
    // Lengths straddle every remainder of the vector width.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 100u, 1001u}) {
      CAPTURE(n);
      const auto w = random_vector(n, rng, 0.0, 2.0), u = random_vector(n, rng), v = random_vector(n, rng);
      CHECK(rel(t->weighted_dot(w.data(), u.data(), v.data(), n), ref.weighted_dot(w.data(), u.data(), v.data(), n)) <
            1e-13);

      auto y1 = v, y2 = v;
      t->axpy(0.37, u.data(), y1.data(), n);
      ref.axpy(0.37, u.data(), y2.data(), n);
      CHECK(ref.max_abs_diff(y1.data(), y2.data(), n) <= 1e-15);

      std::vector<double> h1(n), h2(n);
      t->hadamard(w.data(), u.data(), h1.data(), n);
      ref.hadamard(w.data(), u.data(), h2.data(), n);
      CHECK(ref.max_abs_diff(h1.data(), h2.data(), n) == 0.0);

      if (n >= 1) {
        const auto off = random_vector(n - 1, rng);
        std::vector<double> t1(n), t2(n);
        t->tridiag_apply(w.data(), off.data(), u.data(), t1.data(), n);
        ref.tridiag_apply(w.data(), off.data(), u.data(), t2.data(), n);
        CHECK(ref.max_abs_diff(t1.data(), t2.data(), n) <= 1e-14);
      }
      CHECK(t->max_abs_diff(u.data(), v.data(), n) == ref.max_abs_diff(u.data(), v.data(), n));
    }
  }
}

TEST_CASE("span helpers route through the active table") {
  std::vector<double> w{1, 1, 1, 1, 1}, u{1, 2, 3, 4, 5}, y(5, 0.0);
  CHECK(kernels::weighted_dot(w, u, u) == doctest::Approx(55.0));
  kernels::axpy(-1.0, u, y);
  CHECK(kernels::max_abs_diff(y, std::vector<double>{-1, -2, -3, -4, -5}) == 0.0);
  kernels::hadamard(u, u, y);
  CHECK(y[4] == 25.0);
}
