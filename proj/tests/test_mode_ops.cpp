#include <cmath>
#include <functional>
#include <memory>

#include "doctest.h"
#include "kreinlab/mode_ops.hpp"
#include "kreinlab/spectra.hpp"

using namespace kreinlab;

namespace {

using Fn = std::function<double(double)>;

std::shared_ptr<const RadialGrid> grid(int n, double R = 30.0, double grading = 3.0) {
  return std::make_shared<const RadialGrid>(build_grid(1.0, R, n, grading));
}

/// Max nodal error of the discrete solution of A u = f against the exact u.
double solve_error(const RealizationSpec& spec, int m, int n, const Fn& u, const Fn& f) {
  const auto g = grid(n);
  const auto mm = apply_bc(assemble_second_order(m, g, {2, 1.0}), spec);
  const auto r = mm.radii();
  Eigen::VectorXd rhs(mm.size());
  for (int i = 0; i < mm.size(); ++i) rhs[i] = f(r[i]);
  const Eigen::VectorXd x = solve(mm, rhs);
  double err = 0.0;
  for (int i = 0; i < mm.size(); ++i) err = std::max(err, std::fabs(x[i] - u(r[i])));
  return err;
}

}  // namespace

TEST_CASE("realization shapes and names") {
  const auto g = grid(100);
  const auto raw = assemble_second_order(3, g, {2, 1.0});
  CHECK(raw.raw());
  CHECK(raw.size() == 100);
  const auto d = apply_bc(raw, bc::Dirichlet{});
  CHECK(d.size() == 98);
  CHECK(d.first() == 1);
  const auto rb = apply_bc(raw, bc::Robin{2.0});
  CHECK(rb.size() == 99);
  CHECK(rb.first() == 0);
  CHECK(std::string(realization_name(rb.spec().value())) == "robin");
  CHECK(realization_order(bc::BiharmonicNormal{}) == 4);
  // Robin adds r0 * b to the boundary energy entry of the Neumann realization.
  const auto nn = apply_bc(raw, bc::Neumann{});
  CHECK(rb.energy()(0, 0) - nn.energy()(0, 0) == doctest::Approx(2.0));
  CHECK(rb.energy()(1, 0) == nn.energy()(1, 0));
}

TEST_CASE("energy forms are symmetric so realizations are self-adjoint") {
  const auto g = grid(120);
  for (int m : {0, 1, 7}) {
    const auto raw2 = assemble_second_order(m, g, {2, 1.0});
    const auto raw4 = assemble_biharmonic(m, g, {4, 1.0});
    for (const auto& mm : {apply_bc(raw2, bc::Dirichlet{}), apply_bc(raw2, bc::Robin{1.0}),
                           apply_bc(raw4, bc::BiharmonicNormal{BoundarySymbol::constant(1.0 + m, m)})}) {
      CHECK(mm.symmetry_defect() < 1e-14);
      // A = W^{-1} K is self-adjoint in the weighted pairing: W A = (W A)^T.
      const Eigen::MatrixXd a = mm.dense();
      const auto w = mm.weights();
      const Eigen::MatrixXd wa = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()).asDiagonal() * a;
      CHECK((wa - wa.transpose()).norm() <= 1e-12 * wa.norm());
    }
  }
}

TEST_CASE("Dirichlet manufactured solution converges at second order") {
  // u = s e^{-s}, s = r - 1, vanishes at r = 1 and is negligible at R = 30.
  const int m = 2;
  Fn u = [](double r) { return (r - 1.0) * std::exp(1.0 - r); };
  Fn f = [&](double r) {
    const double s = r - 1.0, e = std::exp(-s);
    return -(s - 2.0) * e - (1.0 - s) * e / r + (m * m / (r * r) + 1.0) * s * e;
  };
  const double e1 = solve_error(bc::Dirichlet{}, m, 200, u, f);
  const double e2 = solve_error(bc::Dirichlet{}, m, 400, u, f);
  CHECK(e1 < 1e-3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Neumann and Robin manufactured solutions converge at second order") {
  // u = (1 + s) e^{-s} has u'(1) = 0; w = (1 + 2 s) e^{-s} has w'(1) = 1 = b w(1)
  // for b = 1.
  const int m = 0;
  Fn un = [](double r) { return (r) * std::exp(1.0 - r); };
  Fn fn = [](double r) {
    const double s = r - 1.0, e = std::exp(-s);
    return -(s - 1.0) * e + s * e / r + (1.0 + s) * e;
  };
  const double n1 = solve_error(bc::Neumann{}, m, 200, un, fn);
  const double n2 = solve_error(bc::Neumann{}, m, 400, un, fn);
  CHECK(n1 < 1e-3);
  CHECK(std::log2(n1 / n2) == doctest::Approx(2.0).epsilon(0.2));

  // w = (1 + 2s) e^{-s}: w' = (1 - 2s) e^{-s}, w'' = (2s - 3) e^{-s}.
  Fn ur = [](double r) { return (2.0 * r - 1.0) * std::exp(1.0 - r); };
  Fn fr = [](double r) {
    const double s = r - 1.0, e = std::exp(-s);
    return -(2.0 * s - 3.0) * e - (1.0 - 2.0 * s) * e / r + (1.0 + 2.0 * s) * e;
  };
  const double r1 = solve_error(bc::Robin{1.0}, m, 200, ur, fr);
  const double r2 = solve_error(bc::Robin{1.0}, m, 400, ur, fr);
  CHECK(r1 < 1e-3);
  CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("whole-plane operator: manufactured radial solution") {
  // u = exp(-r^2): Delta u = (4 r^2 - 4) e^{-r^2}; -Delta u + u = (5 - 4 r^2) e^{-r^2}.
  auto err = [](int n) {
    const auto ext = build_grid(1.0, 8.0, n, 1.0);
    const auto g = std::make_shared<const RadialGrid>(whole_plane_extension(ext, n / 7));
    const auto mm = whole_plane_operator(0, g, {2, 1.0});
    const auto r = mm.radii();
    Eigen::VectorXd rhs(mm.size());
    for (int i = 0; i < mm.size(); ++i) rhs[i] = (5.0 - 4.0 * r[i] * r[i]) * std::exp(-r[i] * r[i]);
    const Eigen::VectorXd x = solve(mm, rhs);
    double e = 0.0;
    for (int i = 0; i < mm.size(); ++i) e = std::max(e, std::fabs(x[i] - std::exp(-r[i] * r[i])));
    return e;
  };
  const double e1 = err(140), e2 = err(280);
  CHECK(e1 < 1e-2);
  CHECK(std::log2(e1 / e2) > 1.7);
}

TEST_CASE("positive realizations have spectrum above c0") {
  const auto g = grid(300);
  for (int m : {0, 4, 20}) {
    const auto raw = assemble_second_order(m, g, {2, 1.0});
    for (const auto& spec : std::vector<RealizationSpec>{bc::Dirichlet{}, bc::Neumann{}, bc::Robin{10.0}}) {
      const auto ev = spectra::eigs_sym(apply_bc(raw, spec));
      CHECK(ev.front() >= 1.0 - 1e-9);
    }
  }
  const auto g4 = grid(200, 20.0, 2.0);
  for (int m : {0, 3}) {
    const auto mm = apply_bc(assemble_biharmonic(m, g4, {4, 1.0}),
                             bc::BiharmonicNormal{BoundarySymbol::constant(1.0 + m, m)});
    const auto ev = spectra::eigs_sym(mm);
    CHECK(ev.front() >= 1.0 - 1e-4);
  }
}

TEST_CASE("solver choice and failure modes") {
  const auto g = grid(100);
  const auto raw = assemble_second_order(1, g, {2, 1.0});
  CHECK(ModeSolver(apply_bc(raw, bc::Robin{1.0})).method() == BandSolver::Method::cholesky);
  CHECK(must_be_positive(bc::Robin{0.0}));
  CHECK_FALSE(must_be_positive(bc::Robin{-1.0}));
  // Strongly negative Robin coefficients are indefinite but still invertible.
  const auto neg = apply_bc(raw, bc::Robin{-50.0});
  CHECK(ModeSolver(neg).method() == BandSolver::Method::lu);

  CHECK_THROWS_AS(apply_bc(raw, bc::BiharmonicNormal{BoundarySymbol::constant(1.0, 1)}), std::invalid_argument);
  CHECK_THROWS_AS((Coefficients{3, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Coefficients{2, 0.0}.validate()), std::invalid_argument);
  const auto wp = std::make_shared<const RadialGrid>(whole_plane_extension(build_grid(1.0, 5.0, 40, 1.0), 8));
  CHECK_THROWS_AS(assemble_biharmonic(0, wp, {4, 1.0}), std::invalid_argument);
  // NeumannType with a missing mode in C.
  CHECK_THROWS(apply_bc(raw, bc::NeumannType{BoundarySymbol::constant(1.0, 0)}));
}
