#include "kreinlab/band.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "kreinlab/kernels.hpp"

namespace kreinlab {

SymBand::SymBand(int n, int bandwidth) : n_(n), bw_(bandwidth) {
  if (n < 1 || bandwidth < 0) throw std::invalid_argument("SymBand: bad shape");
  diags_.resize(bw_ + 1);
  for (int k = 0; k <= bw_; ++k) diags_[k].assign(std::max(0, n_ - k), 0.0);
}

double& SymBand::at(int i, int j) {
  if (i < j) std::swap(i, j);
  assert(i - j <= bw_ && i < n_ && j >= 0);
  return diags_[i - j][j];
}

double SymBand::operator()(int i, int j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0;
  return diags_[i - j][j];
}

void SymBand::apply(std::span<const double> x, std::span<double> y) const {
  assert(static_cast<int>(x.size()) == n_ && static_cast<int>(y.size()) == n_);
  if (bw_ == 1) {
    kernels::active().tridiag_apply(diags_[0].data(), diags_[1].data(), x.data(), y.data(), n_);
    return;
  }
  kernels::hadamard(diags_[0], x, y);
  for (int k = 1; k <= bw_; ++k) {
    const auto& d = diags_[k];
    const int len = n_ - k;
    // Lower and upper halves of diagonal k.
    for (int j = 0; j < len; ++j) {
      y[j + k] += d[j] * x[j];
      y[j] += d[j] * x[j + k];
    }
  }
}

Eigen::MatrixXd SymBand::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int k = 0; k <= bw_; ++k)
    for (int j = 0; j + k < n_; ++j) {
      m(j + k, j) = diags_[k][j];
      m(j, j + k) = diags_[k][j];
    }
  return m;
}

SymBand SymBand::block(int first, int count) const {
  if (first < 0 || count < 1 || first + count > n_) throw std::out_of_range("SymBand::block");
  SymBand b(count, std::min(bw_, count - 1));
  for (int k = 0; k <= b.bw_; ++k)
    for (int j = 0; j + k < count; ++j) b.diags_[k][j] = diags_[k][first + j];
  return b;
}

SymBand SymBand::scaled(std::span<const double> d) const {
  assert(static_cast<int>(d.size()) == n_);
  SymBand b = *this;
  for (int k = 0; k <= bw_; ++k)
    for (int j = 0; j + k < n_; ++j) b.diags_[k][j] *= d[j] * d[j + k];
  return b;
}

void SymBand::add_rank_one(double alpha, std::span<const double> v) {
  const int len = static_cast<int>(v.size());
  if (len - 1 > bw_ || len > n_) throw std::invalid_argument("add_rank_one: support exceeds band");
  for (int i = 0; i < len; ++i)
    for (int j = 0; j <= i; ++j) at(i, j) += alpha * v[i] * v[j];
}

double SymBand::max_abs() const {
  double m = 0.0;
  for (const auto& d : diags_)
    for (double v : d) m = std::max(m, std::fabs(v));
  return m;
}

BandSolver BandSolver::cholesky(const SymBand& a) {
  BandSolver s;
  s.method_ = Method::cholesky;
  s.n_ = a.size();
  s.kd_ = a.bandwidth();
  if (s.kd_ == 1) {
    // Tridiagonal LDL^T: ab = [d (n), e (n - 1)].
    s.ab_.assign(a.diagonal(0).begin(), a.diagonal(0).end());
    s.ab_.insert(s.ab_.end(), a.diagonal(1).begin(), a.diagonal(1).end());
    const lapack_int info = LAPACKE_dpttrf(s.n_, s.ab_.data(), s.ab_.data() + s.n_);
    if (info != 0)
      throw FactorizationError("tridiagonal LDL^T failed (matrix not positive definite), info=" +
                               std::to_string(info));
    return s;
  }
  s.ldab_ = s.kd_ + 1;
  s.ab_.assign(static_cast<std::size_t>(s.ldab_) * s.n_, 0.0);
  // Lower storage: ab(k, j) = A(j + k, j), column-major.
  for (int k = 0; k <= s.kd_; ++k)
    for (int j = 0; j + k < s.n_; ++j) s.ab_[k + static_cast<std::size_t>(j) * s.ldab_] = a(j + k, j);
  const lapack_int info =
      LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', s.n_, s.kd_, s.ab_.data(), s.ldab_);
  if (info != 0)
    throw FactorizationError("banded Cholesky failed (matrix not positive definite), info=" +
                             std::to_string(info));
  return s;
}

BandSolver BandSolver::lu(const SymBand& a) {
  BandSolver s;
  s.method_ = Method::lu;
  s.n_ = a.size();
  s.kd_ = a.bandwidth();
  if (s.kd_ == 1) {
    // Tridiagonal LU: ab = [dl (n - 1), d (n), du (n - 1), du2 (n - 2)].
    const int n = s.n_;
    s.ab_.assign(static_cast<std::size_t>(4 * n - 4), 0.0);
    std::copy(a.diagonal(1).begin(), a.diagonal(1).end(), s.ab_.begin());
    std::copy(a.diagonal(0).begin(), a.diagonal(0).end(), s.ab_.begin() + (n - 1));
    std::copy(a.diagonal(1).begin(), a.diagonal(1).end(), s.ab_.begin() + (2 * n - 1));
    s.ipiv_.resize(n);
    double* base = s.ab_.data();
    const lapack_int info =
        LAPACKE_dgttrf(n, base, base + (n - 1), base + (2 * n - 1), base + (3 * n - 2), s.ipiv_.data());
    if (info != 0)
      throw FactorizationError("tridiagonal LU met a zero pivot at " + std::to_string(info) +
                               " (singular realization)");
    return s;
  }
  const int kl = s.kd_, ku = s.kd_;
  s.ldab_ = 2 * kl + ku + 1;
  s.ab_.assign(static_cast<std::size_t>(s.ldab_) * s.n_, 0.0);
  // General band storage: ab(kl + ku + i - j, j) = A(i, j).
  for (int j = 0; j < s.n_; ++j)
    for (int i = std::max(0, j - ku); i <= std::min(s.n_ - 1, j + kl); ++i)
      s.ab_[(kl + ku + i - j) + static_cast<std::size_t>(j) * s.ldab_] = a(i, j);
  s.ipiv_.resize(s.n_);
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, s.n_, s.n_, kl, ku, s.ab_.data(), s.ldab_, s.ipiv_.data());
  if (info != 0)
    throw FactorizationError("banded LU met a zero pivot at " + std::to_string(info) +
                             " (singular realization)");
  return s;
}

BandSolver BandSolver::any(const SymBand& a) {
  try {
    return cholesky(a);
  } catch (const FactorizationError&) {
    return lu(a);
  }
}

void BandSolver::solve_in_place(double* b, int nrhs) const {
  lapack_int info = 0;
  if (kd_ == 1) {
    const double* base = ab_.data();
    const int n = n_;
    if (method_ == Method::cholesky)
      info = LAPACKE_dpttrs(LAPACK_COL_MAJOR, n, nrhs, base, base + n, b, n);
    else
      info = LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n, nrhs, base, base + (n - 1), base + (2 * n - 1),
                            base + (3 * n - 2), ipiv_.data(), b, n);
  } else if (method_ == Method::cholesky) {
    info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', n_, kd_, nrhs, ab_.data(), ldab_, b, n_);
  } else {
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kd_, kd_, nrhs, ab_.data(), ldab_,
                          ipiv_.data(), b, n_);
  }
  if (info != 0) throw FactorizationError("banded solve failed, info=" + std::to_string(info));
}

Eigen::VectorXd BandSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("BandSolver::solve: size mismatch");
  Eigen::VectorXd x = rhs;
  solve_in_place(x.data(), 1);
  return x;
}

void BandSolver::solve_in_place(Eigen::MatrixXd& x) const {
  if (x.rows() != n_) throw std::invalid_argument("BandSolver::solve_in_place: size mismatch");
  solve_in_place(x.data(), static_cast<int>(x.cols()));
}

Eigen::MatrixXd BandSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("BandSolver::solve: size mismatch");
  Eigen::MatrixXd x = rhs;
  solve_in_place(x.data(), static_cast<int>(x.cols()));
  return x;
}

std::vector<double> band_eigenvalues(const SymBand& a) {
  const int n = a.size();
  std::vector<double> d(a.diagonal(0).begin(), a.diagonal(0).end());
  if (n == 1) return d;
  if (a.bandwidth() == 1) {
    std::vector<double> e(a.diagonal(1).begin(), a.diagonal(1).end());
    // dpteqr computes the eigenvalues of a positive definite tridiagonal to
    // high relative accuracy; fall back to dstev when it is not definite.
    std::vector<double> d2 = d, e2 = e;
    double z = 0.0;
    // The LAPACKE wrapper sizes the workspace as 1 for compz = 'N', but the
    // reference routine then runs dlasq1, which needs 4n.
    std::vector<double> work(4 * static_cast<std::size_t>(n));
    if (LAPACKE_dpteqr_work(LAPACK_COL_MAJOR, 'N', n, d2.data(), e2.data(), &z, 1, work.data()) == 0) {
      std::sort(d2.begin(), d2.end());
      return d2;
    }
    if (LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, d.data(), e.data(), &z, 1) != 0)
      throw FactorizationError("tridiagonal eigensolver did not converge");
    return d;
  }
  const int kd = a.bandwidth();
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int k = 0; k <= kd; ++k)
    for (int j = 0; j + k < n; ++j) ab[k + static_cast<std::size_t>(j) * ldab] = a(j + k, j);
  std::vector<double> w(n);
  double z = 0.0;
  if (LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd, ab.data(), ldab, w.data(), &z, 1) != 0)
    throw FactorizationError("banded eigensolver did not converge");
  return w;
}

}  // namespace kreinlab
