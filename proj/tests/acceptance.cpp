// Acceptance run: executes every experiment at its default configuration and
// prints one PASS/FAIL line per acceptance criterion AC1..AC10.
//
//   kreinlab_acceptance [--expect-red AC3,AC7] [--jobs K]
//
// Without --expect-red the exit status is 0 iff every criterion passes. With
// it, the exit status is 0 iff exactly the listed criteria fail: criteria
// that are known to be unattainable as stated (see README) stay visible as
// FAIL lines, while any other regression, or an unexpected pass, still fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kreinlab/experiments.hpp"
#include "kreinlab/krein.hpp"
#include "oracles.hpp"

using namespace kreinlab;

namespace {

struct Line {
  std::string id;
  std::string text;
  bool pass = true;
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// Conjunction of the named criteria, with their measured values listed.
Line from_criteria(const std::string& id, const std::string& title, const ExperimentReport& r,
                   const std::vector<std::string>& ids) {
  Line l{id, title + ":", true};
  for (const auto& c : ids) {
    const auto& crit = r.criterion(c);
    l.pass = l.pass && crit.pass;
    l.text += " " + c + "=" + g(crit.measured) + (crit.pass ? "" : "(!)");
  }
  return l;
}

ExperimentReport run_default(const std::string& type, int jobs) {
  auto cfg = default_config(type);
  cfg.jobs = jobs;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = run_experiment(cfg);
  std::fprintf(stderr, "  ran %-15s in %6.1f s\n", type.c_str(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return r;
}

/// DtN and Lambda of mode 0 on the refinement ladder against the Bessel and
/// quadrature oracles.
Line oracle_agreement() {
  const auto cfg = default_config("krein_identity");
  const double p_exact = -oracle::bessel_k(1, 1.0) / oracle::bessel_k(0, 1.0);
  const double l_exact = oracle::lambda(0, cfg.c0, cfg.R);
  std::vector<double> ep, el;
  for (int n : cfg.n_ladder) {
    const auto grid = std::make_shared<const RadialGrid>(build_grid(1.0, cfg.R, n, cfg.grading));
    const auto nd = krein::poisson_mode(0, grid, {2, cfg.c0});
    ep.push_back(std::fabs(nd.P - p_exact));
    el.push_back(std::fabs(nd.Lambda - l_exact));
  }
  const std::size_t k = ep.size() - 1;
  const double order_p = std::log2(ep[k - 1] / ep[k]);
  const double order_l = std::log2(el[k - 1] / el[k]);
  Line l{"AC10", "oracle agreement on N=" + std::to_string(cfg.n_ladder.back()) + ":", true};
  l.text += " |P0+K1(1)/K0(1)|=" + g(ep[k]) + " |Lambda0-quad|=" + g(el[k]) + " order(P0)=" + g(order_p) +
            " order(Lambda0)=" + g(order_l);
  l.pass = ep[k] < 1e-5 && el[k] < 1e-4 && std::fabs(order_p - 2.0) <= 0.3 && std::fabs(order_l - 2.0) <= 0.3;
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria AC1..AC10 at the default configuration"};
  std::string expect_red;
  int jobs = 0;
  app.add_option("--expect-red", expect_red, "Comma-separated criteria known to fail (e.g. AC3,AC7)");
  app.add_option("--jobs", jobs, "Worker threads (default: KREINLAB_JOBS or all cores)");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> expected;
  {
    std::stringstream ss(expect_red);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) expected.insert(item);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto ki = run_default("krein_identity", jobs);
  const auto we = run_default("weyl", jobs);
  const auto ne = run_default("negligibility", jobs);
  const auto un = run_default("union", jobs);
  const auto bi = run_default("biharmonic", jobs);

  std::vector<Line> lines{
      from_criteria("AC1", "Krein identity, Robin b in {0,1,10}, m <= 128 (< 1e-8)", ki, {"identity"}),
      from_criteria("AC2", "Neumann-type equivalence, 20 random L (< 1e-8; order -1 draws by backward error)", ki,
                    {"equivalence", "equivalence_backward"}),
      from_criteria("AC3", "resolvent-difference slopes in [-2.15,-1.85], tightening along M=32,64,128", we,
                    {"slope_dn", "slope_dr", "slope_nr", "tighten_dn", "tighten_dr", "tighten_nr"}),
      from_criteria("AC4", "P1 slope in [-1.2,-0.8]", we, {"slope_p1"}),
      from_criteria("AC5", "negligibility: Poisson p >= 6, off-diagonal p >= 4", ne, {"poisson_p", "offdiagonal_p"}),
      from_criteria("AC6", "cluster at a=0.5: count >= M-4, growth >= dM-2, Dirichlet count 0", un,
                    {"cluster_count_floor", "cluster_count_growth", "dirichlet_cluster"}),
      from_criteria("AC7", "counting gap |N_tilde - N_1| <= M on 50 thresholds in [1,4]", un, {"counting_gap"}),
      from_criteria("AC8", "two-point sigma_ess(T): both clusters >= M/2-4", un, {"pattern_clusters"}),
      from_criteria("AC9", "biharmonic: reduction <= 1e-10, growing cluster at 0.5, spectrum >= 1-1e-4", bi,
                    {"reduction", "cluster_count_floor", "cluster_count_growth", "positivity"}),
      oracle_agreement(),
  };

  bool all_pass = true, as_expected = true;
  for (const auto& l : lines) {
    const bool red = expected.count(l.id) != 0;
    std::printf("%-4s %s  %s%s\n", l.id.c_str(), l.pass ? "PASS" : "FAIL", l.text.c_str(),
                red ? (l.pass ? "  [expected FAIL, now passes]" : "  [known: unattainable as stated, see README]")
                    : "");
    all_pass = all_pass && l.pass;
    as_expected = as_expected && (l.pass != red);
  }
  std::printf("total %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return (expected.empty() ? all_pass : as_expected) ? 0 : 1;
}
