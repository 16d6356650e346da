#pragma once

// Boundary objects of the exterior problem, one Fourier mode at a time:
// null solutions (the Poisson operator K1), the Dirichlet-to-Neumann scalar,
// Lambda = ||zhat||^2, the dictionary T <-> L <-> C, and the Krein-type
// formula
//
//     A~^{-1} = A1^{-1} (+) 0  +  zhat L^{-1} zhat^T W / r_inner.
//
// The DtN scalar is read off the same boundary energy row that carries the
// Robin coefficient, so the formula is an identity of the discrete algebra:
// for the realization du/dr(1) = C u(1) the Schur complement of the boundary
// node is exactly r_inner (C - P).

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "kreinlab/grid.hpp"
#include "kreinlab/mode_ops.hpp"
#include "kreinlab/symbol.hpp"

namespace kreinlab::krein {

/// Null solution of mode m normalized to boundary value 1.
struct ModeNullData {
  int m = 0;
  /// Values on nodes 0..N-2 (boundary node first; the far node is 0).
  Eigen::VectorXd zhat;
  /// DtN scalar, approximates d zhat/dr at r_inner. Negative for c0 > 0.
  double P = 0.0;
  /// Weighted squared norm of zhat.
  double Lambda = 0.0;
  std::shared_ptr<const RadialGrid> grid;
};

/// Solves the discrete A_m u = 0 with u(r_inner) = 1, u(R) = 0.
/// Throws FactorizationError if the interior Dirichlet block is singular.
ModeNullData poisson_mode(int m, std::shared_ptr<const RadialGrid> g, const Coefficients& co);

/// L_m = t_m Lambda_m / r_inner.
double l_from_T(const TSpec& t, const ModeNullData& nd);
/// L symbol over every mode in `nd`.
BoundarySymbol l_symbol(const TSpec& t, std::span<const ModeNullData> nd);
/// DtN symbol {P_m}.
BoundarySymbol dtn_symbol(std::span<const ModeNullData> nd);
/// Lambda symbol {Lambda_m} (order -1).
BoundarySymbol lambda_symbol(std::span<const ModeNullData> nd);

/// C = L + P. Throws on mode-set mismatch.
BoundarySymbol c_from_L(const BoundarySymbol& L, const BoundarySymbol& P);
/// L = C - P. Throws on mode-set mismatch.
BoundarySymbol l_from_C(const BoundarySymbol& C, const BoundarySymbol& P);

/// A1^{-1} (+) 0 + zhat (1/L_m) zhat^T W / r_inner on nodes 0..N-2.
/// `dirichlet` must be the Dirichlet realization of the same mode and grid.
/// Throws std::domain_error for L_m == 0 (non-invertible realization).
Eigen::MatrixXd krein_inverse(const ModeMatrix& dirichlet, const ModeNullData& nd, double L_m);
/// Same, reusing a precomputed dense Dirichlet inverse (nodes 1..N-2).
Eigen::MatrixXd krein_inverse(const Eigen::MatrixXd& dirichlet_inverse, const ModeNullData& nd,
                              double L_m);
/// Same, written into `out` (storage reused when the size already matches).
void krein_inverse_into(const Eigen::MatrixXd& dirichlet_inverse, const ModeNullData& nd, double L_m,
                        Eigen::MatrixXd& out);

/// Weighted norms (inner, outer) of zhat split at radius `rc`: nodes with
/// r <= rc go to the inner part.
std::pair<double, double> split_norms(const ModeNullData& nd, double rc);

/// The two singular values (descending) of the Krein correction
/// zhat (1/L_m) zhat^T W / r_inner with its r <= rc diagonal block removed.
/// In the orthonormal pair (inner part, outer part) of zhat it reduces to
/// (beta / (r_inner |L_m|)) [[0, alpha], [alpha, beta]].
std::array<double, 2> offdiagonal_singular_values(const ModeNullData& nd, double L_m, double rc);

// ---------------------------------------------------------------------------
// Biharmonic A = Delta^2 + c0 with the normal condition
//   u(1) = 0,  (Delta u)(1) = G1 du/dr(1).

struct BiharmonicModeData {
  int m = 0;
  /// P_{gamma,chi}: maps (u, du/dr) at r_inner of a decaying null solution to
  /// (chi0, chi1) = (-d(Delta u)/dr, Delta u) at r_inner.
  Eigen::Matrix2d P_gamma_chi;
  /// (gamma1 -> chi1) component.
  double Pgammachi = 0.0;
  /// L1_m = G1_m - Pgammachi_m.
  double L1 = 0.0;
  /// Null solution with u(1) = 0, du/dr(1) = 1 on nodes 1..N-2.
  Eigen::VectorXd zhat;
  /// ||zhat||^2 in the weighted pairing.
  double Lambda = 0.0;
};

/// Null solutions and boundary symbols of one biharmonic mode. `raw` must come
/// from assemble_biharmonic.
BiharmonicModeData biharmonic_symbols(const ModeMatrix& raw, const BoundarySymbol& g1);

/// Discrete decaying null solution with u(1) = d0, du/dr(1) = d1 on all nodes.
Eigen::VectorXd biharmonic_null_solution(const ModeMatrix& raw, double d0, double d1);

/// G1~ = G1 + (L1~ - L1). Throws on mode-set mismatch or a zero entry of L1~.
BoundarySymbol biharmonic_perturbed(const BoundarySymbol& g1, const BoundarySymbol& L1,
                                    const BoundarySymbol& Ltilde);

/// Inverse of the clamped reference (u = du/dr = 0 at r_inner) on nodes
/// 1..N-2. Singular along W^{-1} g, the direction removed by the constraint.
Eigen::MatrixXd clamped_inverse(const ModeMatrix& raw);

/// Clamped inverse + zhat (1/L1~) zhat^T W / r_inner.
Eigen::MatrixXd biharmonic_krein_inverse(const ModeMatrix& raw, const BiharmonicModeData& data,
                                         double Ltilde_m);

}  // namespace kreinlab::krein
