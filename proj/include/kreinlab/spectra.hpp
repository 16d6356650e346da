#pragma once

// Measurement instruments: eigenvalues of realizations, singular values of
// per-mode operator differences merged across modes, log-log exponent fits,
// a superpolynomial-decay test, and eigenvalue-cluster counting.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kreinlab/mode_ops.hpp"

namespace kreinlab::spectra {

/// Relative floor below which merged singular values are discarded.
inline constexpr double kSvFloor = 1e-14;

/// Ascending eigenvalues of a realization, computed from the weighted
/// symmetrization W^{-1/2} K W^{-1/2}. Throws std::logic_error when the
/// assembled energy is not symmetric (an assembly bug).
std::vector<double> eigs_sym(const ModeMatrix& mm);

/// Ascending eigenvalues of a dense operator X that is self-adjoint in the
/// weighted pairing: eigenvalues of W^{1/2} X W^{-1/2}. Throws
/// std::logic_error if that matrix is asymmetric beyond `symmetry_tol`
/// (relative to its max entry).
Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& x, std::span<const double> w,
                                     double symmetry_tol = 1e-8);

/// Relative asymmetry of W^{1/2} X W^{-1/2}.
double weighted_symmetry_defect(const Eigen::MatrixXd& x, std::span<const double> w);

/// Ascending eigenvalues of a dense symmetric matrix (LAPACK dsyevd).
Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd a);

/// Largest `k` singular values (descending) of a weighted-self-adjoint X by a
/// randomized range finder with `oversample` extra columns and two power
/// iterations. Deterministic for a given seed.
std::vector<double> top_singular_values(const Eigen::MatrixXd& x, std::span<const double> w, int k,
                                        std::uint64_t seed, int oversample = 8);

struct WeylFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// exp(intercept): estimate of lim s_l l^{-slope}.
  double constant = 0.0;
  /// RMS residual of the least-squares line in log space.
  double residual = 0.0;
  /// 1-based inclusive window.
  int l_lo = 0;
  int l_hi = 0;
};

struct SvEntry {
  double value = 0.0;
  int mode = 0;
  /// 1 for mode 0, 2 for m >= 1 (the +-m pair).
  int multiplicity = 1;
};

struct SingularValueSeries {
  std::string source;
  /// Descending; entries of modes m >= 1 appear twice.
  std::vector<SvEntry> entries;
  std::optional<WeylFit> fit;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  /// 1-based s_l.
  double s(int l) const { return entries.at(static_cast<std::size_t>(l - 1)).value; }
  std::vector<double> values() const;
};

/// Merges descending per-mode lists into one descending series, duplicating
/// m >= 1 values, and drops values below kSvFloor times the largest value.
/// Ties are ordered by mode, so the result does not depend on input order.
SingularValueSeries sv_merge(const std::map<int, std::vector<double>>& per_mode,
                             std::string source = {});

/// Least-squares fit of log s_l against log l over the 1-based window
/// [l_lo, l_hi]. Throws std::invalid_argument if the window leaves the series
/// or holds fewer than 20 points.
WeylFit weyl_fit(const SingularValueSeries& s, int l_lo, int l_hi);
/// Default window [0.1 len, 0.8 len].
WeylFit weyl_fit(const SingularValueSeries& s);

struct NegligibilityVerdict {
  bool pass = false;
  /// Largest p with s_{2l} <= 2^{-p} s_l over the whole test window (capped
  /// at 64).
  int sustained_p = 0;
  int p_max = 0;
  int l_lo = 0;
  int l_hi = 0;
};

/// Superpolynomial-decay test on the window l in [len/4, len/2] (so 2l stays
/// inside the series). Pass iff the sustained p is at least p_max. Series
/// shorter than 40 entries fail with sustained_p = 0.
NegligibilityVerdict negligibility_test(const SingularValueSeries& s, int p_max);

struct Eigenvalue {
  double value = 0.0;
  int mode = 0;
};

struct Cluster {
  double center = 0.0;
  double halfwidth = 0.0;
  int count = 0;
};

struct SpectrumReport {
  /// Ascending, with mode provenance (m >= 1 entries appear twice).
  std::vector<Eigenvalue> eigenvalues;
  std::vector<Cluster> clusters;
  std::vector<std::pair<double, int>> counting;

  std::vector<double> values() const;
};

/// Builds a report from per-mode ascending eigenvalue lists (mode m >= 1
/// counted twice).
SpectrumReport make_report(const std::map<int, std::vector<double>>& per_mode);

/// Number of eigenvalues in [center - halfwidth, center + halfwidth].
/// Throws std::invalid_argument for halfwidth <= 0.
int cluster_count(const SpectrumReport& rep, double center, double halfwidth);

/// N(Lambda) = #{eigenvalues <= Lambda} for ascending thresholds. Throws
/// std::invalid_argument if thresholds are not ascending.
std::vector<std::pair<double, int>> counting_function(const SpectrumReport& rep,
                                                      std::span<const double> thresholds);

/// Assigns every eigenvalue within `halfwidth` of some center to the nearest
/// center (equidistant ties go to the lower center) and returns one cluster per
/// center. Throws std::invalid_argument for overlapping windows.
std::vector<Cluster> detect_clusters(const SpectrumReport& rep, std::vector<double> centers,
                                     double halfwidth);

}  // namespace kreinlab::spectra
