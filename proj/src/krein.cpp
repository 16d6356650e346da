#include "kreinlab/krein.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kreinlab/kernels.hpp"

namespace kreinlab::krein {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// X += alpha * z z^T diag(w), column by column.
void add_weighted_outer(Eigen::MatrixXd& x, double alpha, const Eigen::VectorXd& z,
                        std::span<const double> w, int row_offset) {
  const int n = static_cast<int>(z.size());
  for (int j = 0; j < n; ++j) {
    const double c = alpha * z[j] * w[j];
    if (c == 0.0) continue;
    auto col = x.col(row_offset + j).segment(row_offset, n);
    kernels::axpy(c, as_span(z), {col.data(), static_cast<std::size_t>(n)});
  }
}

struct ClampedParts {
  ModeMatrix normal0;  // G1 = 0 realization, energy B
  BandSolver solver;
  Eigen::VectorXd g;   // slope functional on nodes 1..N-2
  Eigen::VectorXd y;   // B^{-1} g
  double beta = 0.0;   // g^T B^{-1} g
};

ClampedParts clamped_parts(const ModeMatrix& raw) {
  if (!raw.raw() || raw.order() != 4)
    throw std::invalid_argument("biharmonic: expected a raw order-4 matrix from assemble_biharmonic");
  BoundarySymbol zero;
  zero.values.emplace(raw.mode(), 0.0);
  ModeMatrix normal0 = apply_bc(raw, bc::BiharmonicNormal{zero});
  BandSolver solver = BandSolver::cholesky(normal0.energy());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(normal0.size());
  g[0] = raw.boundary_slope()[0];
  g[1] = raw.boundary_slope()[1];
  Eigen::VectorXd y = solver.solve(g);
  const double beta = g.dot(y);
  return {std::move(normal0), std::move(solver), std::move(g), std::move(y), beta};
}

}  // namespace

ModeNullData poisson_mode(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co) {
  if (!g || !g->exterior()) throw std::invalid_argument("poisson_mode: need an exterior grid");
  if (co.order != 2) throw std::invalid_argument("poisson_mode: order-2 operators only");
  const ModeMatrix raw = assemble_second_order(m, g, co);
  const int n = g->size();
  const SymBand& k = raw.energy();

  // Interior Dirichlet block, boundary value 1 moved to the right-hand side.
  const BandSolver interior = BandSolver::cholesky(k.block(1, n - 2));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 2);
  rhs[0] = -k(1, 0);
  const Eigen::VectorXd inner = interior.solve(rhs);

  ModeNullData nd;
  nd.m = m;
  nd.grid = g;
  nd.zhat.resize(n - 1);
  nd.zhat[0] = 1.0;
  nd.zhat.tail(n - 2) = inner;
  // Boundary row of the Neumann energy applied to zhat equals -r0 * dzhat/dr.
  const double row0 = k(0, 0) * 1.0 + k(0, 1) * nd.zhat[1];
  nd.P = -row0 / g->r_inner();
  nd.Lambda = kernels::weighted_dot(g->weights().first(n - 1), as_span(nd.zhat), as_span(nd.zhat));
  return nd;
}

double l_from_T(const TSpec& t, const ModeNullData& nd) {
  return t.value(nd.m) * nd.Lambda / nd.grid->r_inner();
}

BoundarySymbol l_symbol(const TSpec& t, std::span<const ModeNullData> nd) {
  BoundarySymbol s;
  s.order_hint = -1;
  s.invertible = true;
  for (const auto& d : nd) s.values[d.m] = l_from_T(t, d);
  return s;
}

BoundarySymbol dtn_symbol(std::span<const ModeNullData> nd) {
  BoundarySymbol s;
  s.order_hint = 1;
  for (const auto& d : nd) s.values[d.m] = d.P;
  return s;
}

BoundarySymbol lambda_symbol(std::span<const ModeNullData> nd) {
  BoundarySymbol s;
  s.order_hint = -1;
  s.invertible = true;
  for (const auto& d : nd) s.values[d.m] = d.Lambda;
  return s;
}

BoundarySymbol c_from_L(const BoundarySymbol& L, const BoundarySymbol& P) {
  require_same_modes(L, P, "c_from_L");
  BoundarySymbol c;
  c.order_hint = std::max(L.order_hint, P.order_hint);
  for (const auto& [m, l] : L.values) c.values[m] = l + P.at(m);
  return c;
}

BoundarySymbol l_from_C(const BoundarySymbol& C, const BoundarySymbol& P) {
  require_same_modes(C, P, "l_from_C");
  BoundarySymbol l;
  l.order_hint = C.order_hint;
  for (const auto& [m, c] : C.values) l.values[m] = c - P.at(m);
  return l;
}

Eigen::MatrixXd krein_inverse(const ModeMatrix& dirichlet, const ModeNullData& nd, double L_m) {
  if (dirichlet.raw() || !std::holds_alternative<bc::Dirichlet>(*dirichlet.spec()))
    throw std::invalid_argument("krein_inverse: expected the Dirichlet realization");
  if (dirichlet.mode() != nd.m) throw std::invalid_argument("krein_inverse: mode mismatch");
  return krein_inverse(ModeSolver(dirichlet).inverse(), nd, L_m);
}

Eigen::MatrixXd krein_inverse(const Eigen::MatrixXd& dirichlet_inverse, const ModeNullData& nd,
                              double L_m) {
  Eigen::MatrixXd x;
  krein_inverse_into(dirichlet_inverse, nd, L_m, x);
  return x;
}

void krein_inverse_into(const Eigen::MatrixXd& dirichlet_inverse, const ModeNullData& nd, double L_m,
                        Eigen::MatrixXd& x) {
  if (L_m == 0.0 || !std::isfinite(L_m))
    throw std::domain_error("krein_inverse: L_m must be finite and nonzero (A~ not invertible)");
  const int n = static_cast<int>(nd.zhat.size());
  if (dirichlet_inverse.rows() != n - 1 || dirichlet_inverse.cols() != n - 1)
    throw std::invalid_argument("krein_inverse: Dirichlet inverse has the wrong size");
  x.resize(n, n);
  x.row(0).setZero();
  x.col(0).setZero();
  x.bottomRightCorner(n - 1, n - 1) = dirichlet_inverse;
  const double r0 = nd.grid->r_inner();
  add_weighted_outer(x, 1.0 / (r0 * L_m), nd.zhat, nd.grid->weights().first(n), 0);
}

std::pair<double, double> split_norms(const ModeNullData& nd, double rc) {
  double inner = 0.0, outer = 0.0;
  for (Eigen::Index i = 0; i < nd.zhat.size(); ++i) {
    const int k = static_cast<int>(i);
    const double v = nd.grid->weight(k) * nd.zhat[i] * nd.zhat[i];
    (nd.grid->node(k) > rc ? outer : inner) += v;
  }
  return {std::sqrt(inner), std::sqrt(outer)};
}

std::array<double, 2> offdiagonal_singular_values(const ModeNullData& nd, double L_m, double rc) {
  if (L_m == 0.0 || !std::isfinite(L_m))
    throw std::domain_error("offdiagonal_singular_values: L_m must be finite and nonzero");
  const auto [alpha, beta] = split_norms(nd, rc);
  const double scale = beta / std::fabs(nd.grid->r_inner() * L_m);
  const double root = std::sqrt(beta * beta + 4.0 * alpha * alpha);
  // Eigenvalues of [[0, alpha], [alpha, beta]] are (beta +- root) / 2.
  return {scale * (beta + root) / 2.0, scale * (root - beta) / 2.0};
}

BiharmonicModeData biharmonic_symbols(const ModeMatrix& raw, const BoundarySymbol& g1) {
  g1.validate();
  const ClampedParts cp = clamped_parts(raw);
  const RadialGrid& grid = raw.grid();
  const double r0 = grid.r_inner();
  const int n = grid.size();
  const auto w = cp.normal0.weights();

  BiharmonicModeData d;
  d.m = raw.mode();
  d.Pgammachi = -1.0 / (r0 * cp.beta);
  d.L1 = g1.at(raw.mode()) - d.Pgammachi;
  d.zhat = cp.y / cp.beta;
  d.Lambda = kernels::weighted_dot(w, as_span(d.zhat), as_span(d.zhat));

  // Energy of the decaying null solutions with boundary data (d0, d1):
  // E(d) = ||Delta_m u||^2 + c0 ||u||^2 = -r0 d^T P d.
  auto energy = [&](double d0, double d1) {
    const Eigen::VectorXd u = biharmonic_null_solution(raw, d0, d1);
    const SymBand& s = raw.laplacian();
    Eigen::VectorXd su(n);
    s.apply({u.data(), static_cast<std::size_t>(n)}, {su.data(), static_cast<std::size_t>(n)});
    double e = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      const double lap = su[i] / grid.weight(i);
      e += grid.weight(i) * (lap * lap + raw.c0() * u[i] * u[i]);
    }
    return e;
  };
  const double e10 = energy(1.0, 0.0);
  const double e01 = energy(0.0, 1.0);
  const double e11 = energy(1.0, 1.0);
  const double cross = 0.5 * (e11 - e10 - e01);
  d.P_gamma_chi << -e10 / r0, -cross / r0, -cross / r0, -e01 / r0;
  return d;
}

Eigen::VectorXd biharmonic_null_solution(const ModeMatrix& raw, double d0, double d1) {
  const ClampedParts cp = clamped_parts(raw);
  const RadialGrid& grid = raw.grid();
  const int n = grid.size();
  const int ni = n - 2;
  const SymBand& s = raw.laplacian();
  const double h0 = grid.spacing(0), h1 = grid.spacing(1);
  const double alpha0 = -(2.0 * h0 + h1) / (h0 * (h0 + h1));

  // Coupling of u(r_inner) = d0 into the interior energy: f0 = S_II W^{-1} S_I0.
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(ni);
  const double s10 = s(1, 0);
  const auto w = cp.normal0.weights();
  f0[0] = s(1, 1) * s10 / w[0];
  f0[1] = s(2, 1) * s10 / w[0];
  Eigen::VectorXd bf = cp.solver.solve(f0);
  const double lambda = (d1 - alpha0 * d0 + d0 * cp.g.dot(bf)) / cp.beta;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u[0] = d0;
  u.segment(1, ni) = -d0 * bf + lambda * cp.y;
  return u;
}

BoundarySymbol biharmonic_perturbed(const BoundarySymbol& g1, const BoundarySymbol& L1,
                                    const BoundarySymbol& Ltilde) {
  require_same_modes(g1, L1, "biharmonic_perturbed");
  require_same_modes(g1, Ltilde, "biharmonic_perturbed");
  BoundarySymbol lt = Ltilde;
  lt.invertible = true;
  lt.validate();
  BoundarySymbol out;
  out.order_hint = g1.order_hint;
  for (const auto& [m, g] : g1.values) out.values[m] = g + (Ltilde.at(m) - L1.at(m));
  return out;
}

Eigen::MatrixXd clamped_inverse(const ModeMatrix& raw) {
  // Eliminate the first interior node through the constraint g.u = 0:
  // u = Q v with u_0 = rho v_0, rho = -g_1 / g_0, and D_gamma = Q (Q^T B Q)^{-1} Q^T.
  // This avoids the cancellation in B^{-1} - y y^T / beta for large beta.
  const ClampedParts cp = clamped_parts(raw);
  const SymBand& b = cp.normal0.energy();
  const int ni = b.size();
  const double rho = -cp.g[1] / cp.g[0];
  SymBand reduced = b.block(1, ni - 1);
  reduced.at(0, 0) += 2.0 * rho * b(0, 1) + rho * rho * b(0, 0);
  if (ni > 2) reduced.at(1, 0) += rho * b(0, 2);
  const BandSolver solver = BandSolver::cholesky(reduced);

  const auto w = cp.normal0.weights();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni - 1, ni);
  rhs(0, 0) = rho * w[0];
  for (int j = 0; j + 1 < ni; ++j) rhs(j, j + 1) = w[j + 1];
  const Eigen::MatrixXd y = solver.solve(rhs);
  Eigen::MatrixXd x(ni, ni);
  x.row(0) = rho * y.row(0);
  x.bottomRows(ni - 1) = y;
  return x;
}

Eigen::MatrixXd biharmonic_krein_inverse(const ModeMatrix& raw, const BiharmonicModeData& data,
                                         double Ltilde_m) {
  if (Ltilde_m == 0.0 || !std::isfinite(Ltilde_m))
    throw std::domain_error("biharmonic_krein_inverse: L1~ must be finite and nonzero");
  Eigen::MatrixXd x = clamped_inverse(raw);
  const auto w = raw.grid().weights().subspan(1, x.rows());
  add_weighted_outer(x, 1.0 / (raw.grid().r_inner() * Ltilde_m), data.zhat, w, 0);
  return x;
}

}  // namespace kreinlab::krein
