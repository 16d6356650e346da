#include <Eigen/Dense>
#include <random>
#include <span>

#include "doctest.h"
#include "kreinlab/band.hpp"

using namespace kreinlab;

namespace {

SymBand random_band(int n, int bw, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymBand a(n, bw);
  for (int k = 0; k <= bw; ++k)
    for (int j = 0; j + k < n; ++j) a.at(j + k, j) = u(rng) + (k == 0 ? shift : 0.0);
  return a;
}

}  // namespace

TEST_CASE("banded storage round-trips through dense form") {
  for (int bw : {0, 1, 2, 4}) {
    const auto a = random_band(12, bw, 0.0, 1 + bw);
    const Eigen::MatrixXd d = a.dense();
    CHECK((d - d.transpose()).norm() == 0.0);
    CHECK(a(0, 11) == (bw >= 11 ? d(0, 11) : 0.0));
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(12, -1.0, 2.0), y(12);
    a.apply(std::span<const double>(x.data(), 12), std::span<double>(y.data(), 12));
    CHECK((y - d * x).norm() < 1e-13);
  }
}

TEST_CASE("block, scaling and rank-one updates") {
  const auto a = random_band(10, 2, 0.0, 3);
  const Eigen::MatrixXd d = a.dense();
  CHECK((a.block(3, 5).dense() - d.block(3, 3, 5, 5)).norm() == 0.0);
  std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(s.data(), 10);
  CHECK((a.scaled(s).dense() - sv.asDiagonal() * d * sv.asDiagonal()).norm() < 1e-12);
  SymBand b = a;
  std::vector<double> v{1.0, -2.0, 0.5};
  b.add_rank_one(3.0, v);
  Eigen::VectorXd ve = Eigen::VectorXd::Zero(10);
  ve.head(3) << 1.0, -2.0, 0.5;
  CHECK((b.dense() - d - 3.0 * ve * ve.transpose()).norm() < 1e-14);
  std::vector<double> too_long{1, 1, 1, 1};
  CHECK_THROWS_AS(b.add_rank_one(1.0, too_long), std::invalid_argument);
}

TEST_CASE("solvers agree with dense LU for tridiagonal and wider bands") {
  for (int bw : {1, 2, 3}) {
    CAPTURE(bw);
    const auto spd = random_band(40, bw, 8.0, 10 + bw);
    const auto ind = random_band(40, bw, 0.1, 20 + bw);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Random(40, 3);

    const auto chol = BandSolver::cholesky(spd);
    CHECK(chol.method() == BandSolver::Method::cholesky);
    CHECK((chol.solve(rhs) - spd.dense().lu().solve(rhs)).norm() < 1e-11);

    CHECK_THROWS_AS(BandSolver::cholesky(ind), FactorizationError);
    const auto any = BandSolver::any(ind);
    CHECK(any.method() == BandSolver::Method::lu);
    const Eigen::MatrixXd x = any.solve(rhs);
    CHECK((ind.dense() * x - rhs).norm() / rhs.norm() < 1e-10);
    const Eigen::VectorXd x1 = any.solve(Eigen::VectorXd(rhs.col(1)));
    CHECK((x1 - x.col(1)).norm() < 1e-12);
  }
}

TEST_CASE("singular band matrix raises FactorizationError") {
  SymBand z(5, 1);
  CHECK_THROWS_AS(BandSolver::lu(z), FactorizationError);
  CHECK_THROWS_AS(BandSolver::any(z), FactorizationError);
  const auto a = random_band(5, 1, 4.0, 1);
  CHECK_THROWS_AS(BandSolver::cholesky(a).solve(Eigen::VectorXd(Eigen::VectorXd::Ones(4))), std::invalid_argument);
}

TEST_CASE("band eigenvalues match a dense symmetric eigensolver") {
  for (int bw : {0, 1, 2}) {
    for (double shift : {6.0, 0.0}) {  // definite and indefinite
      CAPTURE(bw);
      CAPTURE(shift);
      const auto a = random_band(30, bw, shift, 100 + bw);
      const auto ev = band_eigenvalues(a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.dense());
      REQUIRE(ev.size() == 30u);
      for (int i = 0; i < 30; ++i) CHECK(ev[i] == doctest::Approx(es.eigenvalues()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("small eigenvalues of a graded definite tridiagonal keep relative accuracy") {
  // diag(1, 1e-8, 1e-16) scaled Laplacian-like matrix: D T D with T SPD.
  SymBand t(3, 1);
  t.at(0, 0) = 2.0;
  t.at(1, 1) = 2.0;
  t.at(2, 2) = 2.0;
  t.at(1, 0) = -1.0;
  t.at(2, 1) = -1.0;
  std::vector<double> d{1.0, 1e-6, 1e-12};
  const auto ev = band_eigenvalues(t.scaled(d));
  // Smallest eigenvalue ~ det / (product of the other two) ~ 1e-24 * 4 / ... ; compare
  // to the product of eigenvalues, which equals det = det(T) * prod(d)^2 = 4e-36.
  CHECK(ev[0] > 0.0);
  CHECK(ev[0] * ev[1] * ev[2] == doctest::Approx(4e-36).epsilon(1e-10));
}
