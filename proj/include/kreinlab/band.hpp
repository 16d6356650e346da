#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

namespace kreinlab {

/// Raised when a factorization meets a zero pivot or a realization that must
/// be positive turns out indefinite.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric banded matrix stored by diagonals: diagonal(k)[j] = A(j + k, j).
class SymBand {
 public:
  SymBand() = default;
  SymBand(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  /// Entry (i, j) with |i - j| <= bandwidth. Either triangle may be addressed.
  double& at(int i, int j);
  double operator()(int i, int j) const;

  std::span<const double> diagonal(int k) const { return diags_[k]; }
  std::span<double> diagonal(int k) { return diags_[k]; }

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::MatrixXd dense() const;
  /// Principal submatrix on rows/cols [first, first + count).
  SymBand block(int first, int count) const;
  /// D A D for the diagonal D = diag(d).
  SymBand scaled(std::span<const double> d) const;
  /// Add `alpha * v v^T` where v is supported on [0, v.size()); v.size() - 1
  /// must not exceed the bandwidth.
  void add_rank_one(double alpha, std::span<const double> v);
  double max_abs() const;

 private:
  int n_ = 0;
  int bw_ = 0;
  std::vector<std::vector<double>> diags_;
};

/// Banded factorization reused across right-hand sides: Cholesky for positive
/// definite input, LU with partial pivoting otherwise.
class BandSolver {
 public:
  enum class Method { cholesky, lu };

  /// Cholesky factorization; throws FactorizationError if A is not positive
  /// definite.
  static BandSolver cholesky(const SymBand& a);
  /// LU with partial pivoting; throws FactorizationError if A is singular.
  static BandSolver lu(const SymBand& a);
  /// Cholesky when it succeeds, LU otherwise.
  static BandSolver any(const SymBand& a);

  Method method() const { return method_; }
  int size() const { return n_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  /// Overwrites the columns of `x` with A^{-1} x (no allocation).
  void solve_in_place(Eigen::MatrixXd& x) const;

 private:
  void solve_in_place(double* b, int nrhs) const;

  Method method_ = Method::cholesky;
  int n_ = 0;
  int kd_ = 0;
  int ldab_ = 0;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

/// Ascending eigenvalues of a symmetric banded matrix. Positive definite
/// tridiagonal input goes through a relatively accurate bidiagonal route so
/// that small eigenvalues of strongly graded matrices keep full precision.
std::vector<double> band_eigenvalues(const SymBand& a);

}  // namespace kreinlab
