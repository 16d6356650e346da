#include "kreinlab/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include "kreinlab/band.hpp"

namespace kreinlab::spectra {
namespace {

Eigen::MatrixXd weighted_similarity(const Eigen::MatrixXd& x, std::span<const double> w) {
  const int n = static_cast<int>(x.rows());
  if (x.cols() != n || static_cast<int>(w.size()) != n)
    throw std::invalid_argument("weighted operator: size mismatch");
  Eigen::VectorXd sq(n);
  for (int i = 0; i < n; ++i) sq[i] = std::sqrt(w[i]);
  return sq.asDiagonal() * x * sq.cwiseInverse().asDiagonal();
}

double asymmetry(const Eigen::MatrixXd& s) {
  const double scale = s.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

std::vector<double> eigs_sym(const ModeMatrix& mm) {
  if (mm.symmetry_defect() > 1e-12)
    throw std::logic_error("eigs_sym: assembled energy is not symmetric");
  return band_eigenvalues(mm.symmetrized());
}

double weighted_symmetry_defect(const Eigen::MatrixXd& x, std::span<const double> w) {
  return asymmetry(weighted_similarity(x, w));
}

Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd ev(n);
  if (n == 0) return ev;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), static_cast<lapack_int>(a.outerStride()),
                     ev.data());
  if (info != 0) throw FactorizationError("dsyevd failed, info = " + std::to_string(info));
  return ev;
}

Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& x, std::span<const double> w,
                                     double symmetry_tol) {
  Eigen::MatrixXd s = weighted_similarity(x, w);
  const double defect = asymmetry(s);
  if (defect > symmetry_tol)
    throw std::logic_error("weighted_eigenvalues: operator is not self-adjoint (defect " +
                           std::to_string(defect) + ")");
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  return symmetric_eigenvalues(std::move(sym));
}

std::vector<double> top_singular_values(const Eigen::MatrixXd& x, std::span<const double> w, int k,
                                        std::uint64_t seed, int oversample) {
  const Eigen::MatrixXd s = weighted_similarity(x, w);
  const int n = static_cast<int>(s.rows());
  const int cols = std::min(n, k + oversample);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd omega(n, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < n; ++i) omega(i, j) = gauss(rng);

  Eigen::MatrixXd y = s * omega;
  for (int it = 0; it < 2; ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
    y = s * (s.transpose() * q);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
  const Eigen::MatrixXd b = q.transpose() * s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const auto sv = svd.singularValues();
  std::vector<double> out(sv.data(), sv.data() + std::min<int>(k, static_cast<int>(sv.size())));
  return out;
}

std::vector<double> SingularValueSeries::values() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const auto& e : entries) v.push_back(e.value);
  return v;
}

SingularValueSeries sv_merge(const std::map<int, std::vector<double>>& per_mode, std::string source) {
  SingularValueSeries out;
  out.source = std::move(source);
  for (const auto& [m, list] : per_mode) {
    if (!std::is_sorted(list.begin(), list.end(), std::greater<>()))
      throw std::invalid_argument("sv_merge: per-mode list for mode " + std::to_string(m) +
                                  " is not descending");
    const int mult = m == 0 ? 1 : 2;
    for (double v : list)
      for (int c = 0; c < mult; ++c) out.entries.push_back({std::fabs(v), m, mult});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const SvEntry& a, const SvEntry& b) {
    return std::tie(b.value, a.mode) < std::tie(a.value, b.mode);
  });
  if (!out.entries.empty()) {
    const double floor = kSvFloor * out.entries.front().value;
    std::erase_if(out.entries, [floor](const SvEntry& e) { return !(e.value > floor); });
  }
  return out;
}

WeylFit weyl_fit(const SingularValueSeries& s, int l_lo, int l_hi) {
  const int len = static_cast<int>(s.size());
  if (l_lo < 1 || l_hi > len || l_lo > l_hi)
    throw std::invalid_argument("weyl_fit: window [" + std::to_string(l_lo) + ", " +
                                std::to_string(l_hi) + "] outside series of length " +
                                std::to_string(len));
  const int n = l_hi - l_lo + 1;
  if (n < 20) throw std::invalid_argument("weyl_fit: window holds fewer than 20 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int l = l_lo; l <= l_hi; ++l) {
    const double x = std::log(static_cast<double>(l));
    const double y = std::log(s.s(l));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double mx = sx / n, my = sy / n;
  const double slope = (sxy - n * mx * my) / (sxx - n * mx * mx);
  const double intercept = my - slope * mx;
  double rss = 0;
  for (int l = l_lo; l <= l_hi; ++l) {
    const double r = std::log(s.s(l)) - (intercept + slope * std::log(static_cast<double>(l)));
    rss += r * r;
  }
  return {slope, intercept, std::exp(intercept), std::sqrt(rss / n), l_lo, l_hi};
}

WeylFit weyl_fit(const SingularValueSeries& s) {
  const int len = static_cast<int>(s.size());
  return weyl_fit(s, std::max(1, static_cast<int>(std::ceil(0.1 * len))),
                  static_cast<int>(std::floor(0.8 * len)));
}

NegligibilityVerdict negligibility_test(const SingularValueSeries& s, int p_max) {
  NegligibilityVerdict v;
  v.p_max = p_max;
  const int len = static_cast<int>(s.size());
  if (len < 40) return v;
  v.l_lo = len / 4;
  v.l_hi = len / 2;
  double worst = 64.0;
  for (int l = v.l_lo; l <= v.l_hi; ++l) worst = std::min(worst, std::log2(s.s(l) / s.s(2 * l)));
  v.sustained_p = std::max(0, static_cast<int>(std::floor(worst)));
  v.pass = v.sustained_p >= p_max;
  return v;
}

std::vector<double> SpectrumReport::values() const {
  std::vector<double> v;
  v.reserve(eigenvalues.size());
  for (const auto& e : eigenvalues) v.push_back(e.value);
  return v;
}

SpectrumReport make_report(const std::map<int, std::vector<double>>& per_mode) {
  SpectrumReport rep;
  for (const auto& [m, list] : per_mode) {
    const int mult = m == 0 ? 1 : 2;
    for (double v : list)
      for (int c = 0; c < mult; ++c) rep.eigenvalues.push_back({v, m});
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    return std::tie(a.value, a.mode) < std::tie(b.value, b.mode);
  });
  return rep;
}

int cluster_count(const SpectrumReport& rep, double center, double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("cluster_count: halfwidth must be positive");
  const auto& ev = rep.eigenvalues;
  auto lo = std::lower_bound(ev.begin(), ev.end(), center - halfwidth,
                             [](const Eigenvalue& e, double x) { return e.value < x; });
  auto hi = std::upper_bound(ev.begin(), ev.end(), center + halfwidth,
                             [](double x, const Eigenvalue& e) { return x < e.value; });
  return static_cast<int>(hi - lo);
}

std::vector<std::pair<double, int>> counting_function(const SpectrumReport& rep,
                                                      std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw std::invalid_argument("counting_function: thresholds must be ascending");
  std::vector<std::pair<double, int>> out;
  const auto& ev = rep.eigenvalues;
  for (double t : thresholds) {
    auto it = std::upper_bound(ev.begin(), ev.end(), t,
                               [](double x, const Eigenvalue& e) { return x < e.value; });
    out.emplace_back(t, static_cast<int>(it - ev.begin()));
  }
  return out;
}

std::vector<Cluster> detect_clusters(const SpectrumReport& rep, std::vector<double> centers,
                                     double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("detect_clusters: halfwidth must be positive");
  std::sort(centers.begin(), centers.end());
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (centers[i] - centers[i - 1] < 2.0 * halfwidth)
      throw std::invalid_argument("detect_clusters: overlapping cluster windows");
  std::vector<Cluster> out;
  for (double c : centers) out.push_back({c, halfwidth, 0});
  for (const auto& e : rep.eigenvalues) {
    int best = -1;
    double best_d = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double d = std::fabs(e.value - centers[i]);
      if (d <= halfwidth && (best < 0 || d < best_d)) {
        best = static_cast<int>(i);
        best_d = d;
      }
    }
    if (best >= 0) ++out[static_cast<std::size_t>(best)].count;
  }
  return out;
}

}  // namespace kreinlab::spectra
