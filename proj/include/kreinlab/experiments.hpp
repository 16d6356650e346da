#pragma once

// Named end-to-end scenarios. Each run returns a report holding the echoed
// configuration, measured quantities, pass/fail criteria against declared
// tolerances, and the singular-value / eigenvalue series behind them.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kreinlab/spectra.hpp"

namespace kreinlab {

struct ExperimentConfig {
  std::string name;
  /// krein_identity | weyl | negligibility | union | biharmonic
  std::string type;

  double c0 = 1.0;
  double R = 30.0;
  int N = 600;
  double grading = 3.0;
  int M = 128;

  /// Robin coefficients (krein_identity uses all; weyl uses the first b > 0).
  std::vector<double> b{0.0, 1.0, 10.0};
  /// T = aI.
  double a = 0.5;
  /// Alternating T for the two-point essential spectrum (union).
  std::vector<double> t_pattern{0.4, 0.6};
  /// G1_m = kappa (1 + |m|) (biharmonic).
  double kappa = 1.0;
  /// Perturbation target: L1~ = a_tilde Lambda (biharmonic).
  double a_tilde = 0.5;
  /// Cutoff radius of the exterior region r > r_cut (negligibility).
  double r_cut = 2.0;
  /// Mode ladder (weyl, union, biharmonic).
  std::vector<int> ladder{32, 64, 128};
  /// Grid ladder for the DtN self-convergence study (krein_identity).
  std::vector<int> n_ladder{150, 300, 600, 1200};
  /// Disc nodes of the whole-plane grid (weyl, P1).
  int inner_nodes = 200;
  /// Randomized samples (krein_identity).
  int samples = 20;
  std::uint64_t seed = 20240917;
  /// Worker threads over modes; <= 0 uses default_jobs().
  int jobs = 0;
  /// Criterion bound overrides: "<id>" replaces the single finite bound,
  /// "<id>.lo" / "<id>.hi" replace one side of a two-sided bound.
  std::map<std::string, double> tolerances;

  /// Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

/// The five experiment types with a one-line description each.
const std::vector<std::pair<std::string, std::string>>& experiment_types();

/// Documented default configuration for an experiment type (biharmonic uses a
/// gentler grid, see README). Throws for unknown types.
ExperimentConfig default_config(std::string_view type);

struct Criterion {
  std::string id;
  std::string description;
  double measured = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool pass = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Criterion> criteria;
  /// Additional measured quantities, in insertion order.
  std::vector<std::pair<std::string, double>> measurements;
  /// Series for CSV output (singular values, spectra, per-mode errors).
  std::vector<spectra::SingularValueSeries> series;
  double wall_seconds = 0.0;

  bool passed() const;
  /// Throws std::out_of_range when absent.
  const Criterion& criterion(std::string_view id) const;
  double measurement(std::string_view key) const;
};

ExperimentReport run_krein_identity(const ExperimentConfig& cfg);
ExperimentReport run_weyl(const ExperimentConfig& cfg);
ExperimentReport run_negligibility(const ExperimentConfig& cfg);
ExperimentReport run_union(const ExperimentConfig& cfg);
ExperimentReport run_biharmonic(const ExperimentConfig& cfg);

/// Dispatches on cfg.type.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Relative singular-value cutoff within one mode: per-mode operator
/// differences are exactly rank one (or two) in exact arithmetic, and their
/// remaining singular values are rounding noise near 1e-14 of the leading one.
inline constexpr double kModeRankCutoff = 1e-9;

}  // namespace kreinlab
