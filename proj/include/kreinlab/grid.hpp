#pragma once

#include <span>
#include <vector>

namespace kreinlab {

/// Radial mesh for one Fourier mode of a rotationally symmetric problem.
///
/// Exterior grids cover [r_inner, r_outer] with r_inner > 0 and carry a node
/// on the obstacle boundary. Whole-plane grids (r_inner == 0) are cell
/// centered at the origin: the first node sits half a mesh step away from
/// r = 0. Weights are the exact measures  int_cell r dr  of the dual cells, so
/// they sum to (r_outer^2 - r_inner^2) / 2 up to rounding.
class RadialGrid {
 public:
  double r_inner() const { return r_inner_; }
  double r_outer() const { return r_outer_; }
  double grading() const { return grading_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool exterior() const { return r_inner_ > 0.0; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }

  /// Distance between nodes i and i+1.
  double spacing(int i) const { return nodes_[i + 1] - nodes_[i]; }
  /// Dual-cell face between nodes i and i+1.
  double face(int i) const { return 0.5 * (nodes_[i] + nodes_[i + 1]); }

  /// For whole-plane grids built by `whole_plane_extension`: index of the node
  /// that coincides with the obstacle boundary. -1 otherwise.
  int interface_index() const { return interface_; }

  friend RadialGrid build_grid(double r_inner, double r_outer, int n, double grading);
  friend RadialGrid whole_plane_extension(const RadialGrid& exterior, int inner_nodes);

 private:
  RadialGrid(double r_inner, double r_outer, double grading, std::vector<double> nodes);

  double r_inner_;
  double r_outer_;
  double grading_;
  int interface_ = -1;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Power-law stretched mesh r = r_inner + (R - r_inner) t^grading.
/// grading == 1 is uniform, larger values cluster nodes toward r_inner.
/// Throws std::invalid_argument for n < 16, R <= r_inner, r_inner < 0,
/// grading < 1 or non-finite input.
RadialGrid build_grid(double r_inner, double r_outer, int n, double grading);

/// Whole-plane grid that reuses every node of `exterior` and fills the disc
/// [0, r_inner) with `inner_nodes` cell-centered uniform nodes. Used to compare
/// whole-plane and exterior operators on matched nodes.
RadialGrid whole_plane_extension(const RadialGrid& exterior, int inner_nodes);

/// Discrete L2 pairing  sum_i w_i u_i v_i. Symmetric in (u, v) bit for bit.
double inner_product(std::span<const double> u, std::span<const double> v, const RadialGrid& g);

}  // namespace kreinlab
