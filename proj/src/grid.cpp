#include "kreinlab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kreinlab/kernels.hpp"

namespace kreinlab {

RadialGrid::RadialGrid(double r_inner, double r_outer, double grading, std::vector<double> nodes)
    : r_inner_(r_inner), r_outer_(r_outer), grading_(grading), nodes_(std::move(nodes)) {
  const int n = size();
  weights_.resize(n);
  // Dual cell of node i is [face(i-1), face(i)], closed off by r_inner and r_outer.
  double lo = r_inner_;
  for (int i = 0; i < n; ++i) {
    const double hi = (i + 1 < n) ? face(i) : r_outer_;
    weights_[i] = 0.5 * (hi - lo) * (hi + lo);
    lo = hi;
  }
}

RadialGrid build_grid(double r_inner, double r_outer, int n, double grading) {
  if (!std::isfinite(r_inner) || !std::isfinite(r_outer) || !std::isfinite(grading))
    throw std::invalid_argument("build_grid: non-finite input");
  if (n < 16) throw std::invalid_argument("build_grid: need N >= 16, got " + std::to_string(n));
  if (r_inner < 0.0) throw std::invalid_argument("build_grid: r_inner must be >= 0");
  if (!(r_outer > r_inner)) throw std::invalid_argument("build_grid: need R > r_inner");
  if (grading < 1.0) throw std::invalid_argument("build_grid: grading must be >= 1");

  std::vector<double> nodes(n);
  const double span = r_outer - r_inner;
  if (r_inner > 0.0) {
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      nodes[i] = r_inner + span * std::pow(t, grading);
    }
    nodes.front() = r_inner;
  } else {
    // Half-step offset at the origin keeps every node away from r = 0.
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / (n - 0.5);
      nodes[i] = r_outer * std::pow(t, grading);
    }
  }
  nodes.back() = r_outer;
  return RadialGrid(r_inner, r_outer, grading, std::move(nodes));
}

RadialGrid whole_plane_extension(const RadialGrid& exterior, int inner_nodes) {
  if (!exterior.exterior()) throw std::invalid_argument("whole_plane_extension: need an exterior grid");
  if (inner_nodes < 4) throw std::invalid_argument("whole_plane_extension: need >= 4 inner nodes");
  const double h = exterior.r_inner() / (inner_nodes + 0.5);
  std::vector<double> nodes;
  nodes.reserve(inner_nodes + exterior.size());
  for (int j = 0; j < inner_nodes; ++j) nodes.push_back((j + 0.5) * h);
  for (double r : exterior.nodes()) nodes.push_back(r);
  RadialGrid g(0.0, exterior.r_outer(), exterior.grading(), std::move(nodes));
  g.interface_ = inner_nodes;
  return g;
}

double inner_product(std::span<const double> u, std::span<const double> v, const RadialGrid& g) {
  if (u.size() != v.size() || u.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("inner_product: length mismatch");
  return kernels::weighted_dot(g.weights(), u, v);
}

}  // namespace kreinlab
