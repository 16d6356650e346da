#include "kreinlab/mode_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kreinlab/kernels.hpp"

namespace kreinlab {

void Coefficients::validate() const {
  if (order != 2 && order != 4)
    throw std::invalid_argument("Coefficients: order must be 2 or 4, got " + std::to_string(order));
  if (!(c0 > 0.0) || !std::isfinite(c0))
    throw std::invalid_argument("Coefficients: c0 must be positive and finite");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Flux-form stiffness of -(1/r)(r u')' + (m^2/r^2 + q0) u on nodes [0, n).
// The origin face of a whole-plane grid carries zero flux because r = 0 there.
SymBand flux_stiffness(const RadialGrid& g, int m, double q0) {
  const int n = g.size();
  SymBand k(n, 1);
  auto diag = k.diagonal(0);
  auto off = k.diagonal(1);
  const double m2 = static_cast<double>(m) * m;
  for (int i = 0; i < n; ++i) {
    const double r = g.node(i);
    diag[i] = g.weight(i) * (m2 / (r * r) + q0);
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double f = g.face(i) / g.spacing(i);
    diag[i] += f;
    diag[i + 1] += f;
    off[i] = -f;
  }
  return k;
}

// S W^{-1} S + c0 W for a tridiagonal S and diagonal W on the same nodes.
SymBand square_plus_mass(const SymBand& s, std::span<const double> w, double c0) {
  const int n = s.size();
  SymBand k(n, std::min(2, n - 1));
  auto d = s.diagonal(0);
  auto e = s.diagonal(1);
  for (int i = 0; i < n; ++i) {
    double v = d[i] * d[i] / w[i] + c0 * w[i];
    if (i > 0) v += e[i - 1] * e[i - 1] / w[i - 1];
    if (i + 1 < n) v += e[i] * e[i] / w[i + 1];
    k.at(i, i) = v;
  }
  for (int i = 0; i + 1 < n; ++i) k.at(i + 1, i) = e[i] * d[i] / w[i] + d[i + 1] * e[i] / w[i + 1];
  for (int i = 0; i + 2 < n; ++i) k.at(i + 2, i) = e[i + 1] * e[i] / w[i + 1];
  return k;
}

bool nonnegative_symbol(const BoundarySymbol& s) {
  for (const auto& [m, v] : s.values)
    if (v < 0.0) return false;
  return true;
}

void require_real_entry(const BoundarySymbol& s, int m, const char* what) {
  s.validate();
  if (!s.contains(m))
    throw std::invalid_argument(std::string(what) + ": symbol has no entry for mode " +
                                std::to_string(m));
}

}  // namespace

const char* realization_name(const RealizationSpec& spec) {
  return std::visit(overloaded{
                        [](const bc::Dirichlet&) { return "dirichlet"; },
                        [](const bc::Neumann&) { return "neumann"; },
                        [](const bc::Robin&) { return "robin"; },
                        [](const bc::NeumannType&) { return "neumann_type"; },
                        [](const bc::BiharmonicNormal&) { return "biharmonic_normal"; },
                        [](const bc::BiharmonicPerturbed&) { return "biharmonic_perturbed"; },
                    },
                    spec);
}

int realization_order(const RealizationSpec& spec) {
  return std::holds_alternative<bc::BiharmonicNormal>(spec) ||
                 std::holds_alternative<bc::BiharmonicPerturbed>(spec)
             ? 4
             : 2;
}

bool must_be_positive(const RealizationSpec& spec) {
  return std::visit(overloaded{
                        [](const bc::Dirichlet&) { return true; },
                        [](const bc::Neumann&) { return true; },
                        [](const bc::Robin& r) { return r.b >= 0.0; },
                        [](const bc::NeumannType&) { return false; },
                        [](const bc::BiharmonicNormal& b) { return nonnegative_symbol(b.G1); },
                        [](const bc::BiharmonicPerturbed&) { return false; },
                    },
                    spec);
}

std::span<const double> ModeMatrix::radii() const {
  return grid_->nodes().subspan(first_, size());
}

Eigen::VectorXd ModeMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw std::invalid_argument("ModeMatrix::apply: size mismatch");
  Eigen::VectorXd y(size());
  energy_.apply({x.data(), static_cast<std::size_t>(x.size())},
                {y.data(), static_cast<std::size_t>(y.size())});
  for (int i = 0; i < size(); ++i) y[i] /= weights_[i];
  return y;
}

Eigen::MatrixXd ModeMatrix::dense() const {
  Eigen::MatrixXd a = energy_.dense();
  for (int i = 0; i < size(); ++i) a.row(i) /= weights_[i];
  return a;
}

SymBand ModeMatrix::symmetrized() const {
  std::vector<double> s(weights_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 1.0 / std::sqrt(weights_[i]);
  return energy_.scaled(s);
}

double ModeMatrix::symmetry_defect() const {
  // Check the dense similarity transform of A itself rather than the stored
  // symmetric band, so the invariant is tested on what A actually is.
  const Eigen::MatrixXd a = dense();
  Eigen::VectorXd sw(size());
  for (int i = 0; i < size(); ++i) sw[i] = std::sqrt(weights_[i]);
  const Eigen::MatrixXd s = sw.asDiagonal() * a * sw.cwiseInverse().asDiagonal();
  const double scale = s.cwiseAbs().maxCoeff();
  return scale == 0.0 ? 0.0 : (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
}

ModeMatrix assemble_second_order(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co) {
  co.validate();
  if (co.order != 2) throw std::invalid_argument("assemble_second_order: order mismatch");
  if (m < 0) throw std::invalid_argument("assemble_second_order: mode must be >= 0");
  if (!g || !g->exterior()) throw std::invalid_argument("assemble_second_order: need an exterior grid");
  ModeMatrix mm;
  mm.m_ = m;
  mm.co_ = co;
  mm.grid_ = std::move(g);
  mm.first_ = 0;
  mm.energy_ = flux_stiffness(*mm.grid_, m, co.c0);
  mm.weights_.assign(mm.grid_->weights().begin(), mm.grid_->weights().end());
  return mm;
}

ModeMatrix assemble_biharmonic(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co) {
  co.validate();
  if (co.order != 4) throw std::invalid_argument("assemble_biharmonic: order mismatch");
  if (m < 0) throw std::invalid_argument("assemble_biharmonic: mode must be >= 0");
  if (!g || !g->exterior()) throw std::invalid_argument("assemble_biharmonic: whole-plane grid rejected");
  ModeMatrix mm;
  mm.m_ = m;
  mm.co_ = co;
  mm.grid_ = std::move(g);
  mm.first_ = 0;
  mm.laplacian_ = flux_stiffness(*mm.grid_, m, 0.0);
  mm.weights_.assign(mm.grid_->weights().begin(), mm.grid_->weights().end());
  mm.energy_ = square_plus_mass(mm.laplacian_, mm.weights_, co.c0);
  const double h0 = mm.grid_->spacing(0), h1 = mm.grid_->spacing(1);
  mm.slope_ = {(h0 + h1) / (h0 * h1), -h0 / (h1 * (h0 + h1))};
  return mm;
}

ModeMatrix whole_plane_operator(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co) {
  co.validate();
  if (co.order != 2) throw std::invalid_argument("whole_plane_operator: order mismatch");
  if (m < 0) throw std::invalid_argument("whole_plane_operator: mode must be >= 0");
  if (!g || g->exterior()) throw std::invalid_argument("whole_plane_operator: exterior grid rejected");
  ModeMatrix mm;
  mm.m_ = m;
  mm.co_ = co;
  mm.grid_ = std::move(g);
  mm.first_ = 0;
  const SymBand full = flux_stiffness(*mm.grid_, m, co.c0);
  const int n = mm.grid_->size();
  mm.energy_ = full.block(0, n - 1);
  mm.weights_.assign(mm.grid_->weights().begin(), mm.grid_->weights().end() - 1);
  mm.spec_ = bc::Dirichlet{};
  return mm;
}

ModeMatrix apply_bc(const ModeMatrix& raw, const RealizationSpec& spec) {
  if (!raw.raw()) throw std::invalid_argument("apply_bc: matrix already carries a realization");
  if (realization_order(spec) != raw.order())
    throw std::invalid_argument(std::string("apply_bc: realization '") + realization_name(spec) +
                                "' does not match operator order " + std::to_string(raw.order()));
  const int n = raw.grid().size();
  const double r0 = raw.grid().r_inner();
  const auto w_all = raw.grid().weights();
  ModeMatrix mm = raw;
  mm.spec_ = spec;

  auto keep_boundary = [&](double boundary_coeff) {
    mm.first_ = 0;
    mm.energy_ = raw.energy_.block(0, n - 1);
    mm.energy_.at(0, 0) += r0 * boundary_coeff;
    mm.weights_.assign(w_all.begin(), w_all.end() - 1);
  };
  auto drop_boundary = [&]() {
    mm.first_ = 1;
    mm.energy_ = raw.energy_.block(1, n - 2);
    mm.weights_.assign(w_all.begin() + 1, w_all.end() - 1);
  };
  auto biharmonic = [&](double g1) {
    mm.first_ = 1;
    mm.weights_.assign(w_all.begin() + 1, w_all.end() - 1);
    const SymBand s = raw.laplacian_.block(1, n - 2);
    mm.energy_ = square_plus_mass(s, mm.weights_, raw.c0());
    mm.energy_.add_rank_one(r0 * g1, mm.slope_);
  };

  std::visit(overloaded{
                 [&](const bc::Dirichlet&) { drop_boundary(); },
                 [&](const bc::Neumann&) { keep_boundary(0.0); },
                 [&](const bc::Robin& r) {
                   if (!std::isfinite(r.b)) throw std::invalid_argument("apply_bc: Robin b must be finite");
                   keep_boundary(r.b);
                 },
                 [&](const bc::NeumannType& nt) {
                   require_real_entry(nt.C, raw.mode(), "apply_bc(NeumannType)");
                   keep_boundary(nt.C.at(raw.mode()));
                 },
                 [&](const bc::BiharmonicNormal& b) {
                   require_real_entry(b.G1, raw.mode(), "apply_bc(BiharmonicNormal)");
                   biharmonic(b.G1.at(raw.mode()));
                 },
                 [&](const bc::BiharmonicPerturbed& b) {
                   require_real_entry(b.G1tilde, raw.mode(), "apply_bc(BiharmonicPerturbed)");
                   biharmonic(b.G1tilde.at(raw.mode()));
                 },
             },
             spec);
  return mm;
}

ModeSolver::ModeSolver(const ModeMatrix& mm) : mm_(&mm) {
  if (mm.raw()) throw std::invalid_argument("ModeSolver: raw matrix has no boundary conditions");
  if (must_be_positive(*mm.spec())) {
    try {
      solver_ = BandSolver::cholesky(mm.energy());
    } catch (const FactorizationError& e) {
      throw FactorizationError(std::string("realization '") + realization_name(*mm.spec()) +
                               "' of mode " + std::to_string(mm.mode()) +
                               " is not positive definite: " + e.what());
    }
  } else {
    solver_ = BandSolver::any(mm.energy());
  }
}

Eigen::VectorXd ModeSolver::solve(const Eigen::VectorXd& f) const {
  if (f.size() != mm_->size()) throw std::invalid_argument("ModeSolver::solve: size mismatch");
  Eigen::VectorXd rhs(f.size());
  kernels::hadamard(mm_->weights(), {f.data(), static_cast<std::size_t>(f.size())},
                    {rhs.data(), static_cast<std::size_t>(rhs.size())});
  return solver_.solve(rhs);
}

Eigen::MatrixXd ModeSolver::inverse() const {
  Eigen::MatrixXd x;
  inverse_into(x);
  return x;
}

void ModeSolver::inverse_into(Eigen::MatrixXd& out) const {
  const int n = mm_->size();
  out.setZero(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = mm_->weights()[i];
  solver_.solve_in_place(out);
}

Eigen::MatrixXd ModeSolver::solve_energy(const Eigen::MatrixXd& rhs) const { return solver_.solve(rhs); }

Eigen::VectorXd solve(const ModeMatrix& mm, const Eigen::VectorXd& f) { return ModeSolver(mm).solve(f); }

}  // namespace kreinlab
