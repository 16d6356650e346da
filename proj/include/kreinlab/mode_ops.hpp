#pragma once

// Per-Fourier-mode radial discretizations of
//   order 2:  A = -Delta + c0,   mode form  -(1/r)(r u')' + (m^2/r^2 + c0) u
//   order 4:  A = Delta^2 + c0,  mode form  (Delta_m)^2 u + c0 u
// on RadialGrid meshes, together with the boundary conditions that select a
// realization.
//
// Every operator is stored in energy form K = W A, where W = diag(weights of
// the active nodes). K is symmetric, so A is self-adjoint for the discrete
// L2(r dr) pairing. Second-order operators use the flux (finite-volume) form
//   (K u)_i = f_{i-1/2}(u_i - u_{i-1}) + f_{i+1/2}(u_i - u_{i+1}) + w_i q_i u_i,
// f_{i+1/2} = r_{i+1/2} / h_i. Fourth-order operators square the Dirichlet
// Laplacian: K = S W^{-1} S + c0 W.
//
// Sign convention: the conormal derivative at r = r_inner is +du/dr (the
// interior normal of the exterior domain points away from the origin).

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kreinlab/band.hpp"
#include "kreinlab/grid.hpp"
#include "kreinlab/symbol.hpp"

namespace kreinlab {

struct Coefficients {
  int order = 2;  // 2 or 4
  double c0 = 1.0;

  /// Throws std::invalid_argument unless order is 2 or 4 and c0 > 0.
  void validate() const;
};

namespace bc {
struct Dirichlet {};
struct Neumann {};
/// du/dr(1) = b u(1).
struct Robin {
  double b = 0.0;
};
/// du/dr(1) = C_m u(1).
struct NeumannType {
  BoundarySymbol C;
};
/// u(1) = 0, (Delta_m u)(1) = G1_m du/dr(1).
struct BiharmonicNormal {
  BoundarySymbol G1;
};
/// Same boundary condition with the perturbed symbol G1~.
struct BiharmonicPerturbed {
  BoundarySymbol G1tilde;
};
}  // namespace bc

using RealizationSpec = std::variant<bc::Dirichlet, bc::Neumann, bc::Robin, bc::NeumannType,
                                     bc::BiharmonicNormal, bc::BiharmonicPerturbed>;

const char* realization_name(const RealizationSpec& spec);
/// Order the realization belongs to (2 or 4).
int realization_order(const RealizationSpec& spec);

/// One mode's discrete operator. Raw matrices (no spec) cover every grid node;
/// realizations cover the active nodes [first, first + size).
class ModeMatrix {
 public:
  int mode() const { return m_; }
  int order() const { return co_.order; }
  double c0() const { return co_.c0; }
  const Coefficients& coefficients() const { return co_; }
  const RadialGrid& grid() const { return *grid_; }
  std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }
  const std::optional<RealizationSpec>& spec() const { return spec_; }
  bool raw() const { return !spec_.has_value(); }

  int first() const { return first_; }
  int size() const { return energy_.size(); }
  /// Energy form K = W A on the active nodes.
  const SymBand& energy() const { return energy_; }
  std::span<const double> weights() const { return weights_; }
  /// Active radii.
  std::span<const double> radii() const;

  /// A x on active nodes.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Dense A = W^{-1} K.
  Eigen::MatrixXd dense() const;
  /// W^{1/2} A W^{-1/2} = W^{-1/2} K W^{-1/2}, symmetric banded.
  SymBand symmetrized() const;
  /// Relative asymmetry of the symmetrized matrix (zero by construction of
  /// the storage; kept as the checked invariant for dense inputs).
  double symmetry_defect() const;

  /// Discrete Laplacian stiffness on all nodes (order 4 only; used by the
  /// biharmonic boundary conditions).
  const SymBand& laplacian() const { return laplacian_; }
  /// One-sided second-order du/dr(r_inner) functional on nodes 1 and 2 given
  /// u(r_inner) = 0 (order 4 realizations).
  std::span<const double> boundary_slope() const { return slope_; }

  // Builders.
  friend ModeMatrix assemble_second_order(int m, std::shared_ptr<const RadialGrid> g,
                                          const Coefficients& co);
  friend ModeMatrix assemble_biharmonic(int m, std::shared_ptr<const RadialGrid> g,
                                        const Coefficients& co);
  friend ModeMatrix whole_plane_operator(int m, std::shared_ptr<const RadialGrid> g,
                                         const Coefficients& co);
  friend ModeMatrix apply_bc(const ModeMatrix& raw, const RealizationSpec& spec);

 private:
  int m_ = 0;
  Coefficients co_;
  std::shared_ptr<const RadialGrid> grid_;
  std::optional<RealizationSpec> spec_;
  int first_ = 0;
  SymBand energy_;
  std::vector<double> weights_;
  SymBand laplacian_;
  std::vector<double> slope_;
};

/// Flux-form radial operator of -Delta + c0 for mode m on every node of an
/// exterior grid. End rows are half-cell rows without boundary flux.
ModeMatrix assemble_second_order(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co);

/// (Delta_m)^2 + c0 on an exterior grid: S W^{-1} S + c0 W for the flux-form
/// Laplacian stiffness S on every node. Rows 2..N-3 are exact squares of the
/// interior Laplacian stencil; realizations rebuild the square from the
/// Dirichlet block of S.
ModeMatrix assemble_biharmonic(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co);

/// Whole-plane operator on [0, R] (origin regularity built into the
/// cell-centered first row, homogeneous Dirichlet at R).
ModeMatrix whole_plane_operator(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co);

/// Select the realization. Dirichlet drops the boundary node; Neumann, Robin
/// and NeumannType keep it and add b (resp. C_m) to its energy row;
/// biharmonic specs drop the boundary node and add G1_m g g^T for the slope
/// functional g. The far boundary always keeps homogeneous Dirichlet data.
ModeMatrix apply_bc(const ModeMatrix& raw, const RealizationSpec& spec);

/// Factorization of a realization, reused across right-hand sides.
class ModeSolver {
 public:
  /// Throws FactorizationError when the realization is singular, or when a
  /// realization that must be positive (Dirichlet, Neumann, Robin with b >= 0,
  /// BiharmonicNormal with G1 >= 0) is indefinite.
  explicit ModeSolver(const ModeMatrix& mm);

  /// Solves A u = f.
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;
  /// Dense A^{-1} = K^{-1} W.
  Eigen::MatrixXd inverse() const;
  /// Same, written into `out` (storage reused when the size already matches).
  void inverse_into(Eigen::MatrixXd& out) const;
  /// K^{-1} applied to a block of right-hand sides.
  Eigen::MatrixXd solve_energy(const Eigen::MatrixXd& rhs) const;
  const ModeMatrix& matrix() const { return *mm_; }
  BandSolver::Method method() const { return solver_.method(); }

 private:
  const ModeMatrix* mm_;
  BandSolver solver_;
};

/// Convenience: solve A u = f once.
Eigen::VectorXd solve(const ModeMatrix& mm, const Eigen::VectorXd& f);

/// True when the realization is required to be positive definite.
bool must_be_positive(const RealizationSpec& spec);

}  // namespace kreinlab
