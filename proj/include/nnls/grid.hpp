#pragma once

#include <memory>
#include <vector>

namespace nnls {

/// Uniform radial grid on [0, R] for Dirichlet functions on the ball B_R in
/// dimension N, with quadrature weights for ∫_{B_R} f dx = σ_{N-1} ∫₀^R f s^{N-1} ds.
///
/// Node weights come from piecewise-quadratic interpolation of f integrated
/// exactly against the measure s^{N-1} ds (pairwise, Simpson-like).  Any pair
/// on which that rule would produce a negative weight (this happens where the
/// measure varies strongly across the pair, i.e. at the origin) falls back to
/// piecewise-linear interpolation, which has nonnegative weights by
/// construction.  Both variants integrate constants exactly, so the ball
/// volume is reproduced to round-off for every N and M.
///
/// Cell weights ŵ_c = σ_{N-1} ∫_cell s^{N-1} ds support the gradient pairing
///    a(u,v) = Σ_c ŵ_c (Δu)_c (Δv)_c / h²,
/// which defines the discrete Laplacian used everywhere (see radial.hpp).
class RadialGrid {
 public:
  /// R > 0, M ≥ 16 and even, N ≥ 2.
  RadialGrid(double R, int M, int N);

  double R() const { return R_; }
  int M() const { return M_; }
  int dim() const { return N_; }
  double h() const { return h_; }
  double node(int i) const { return R_ * i / M_; }

  const std::vector<double>& node_weights() const { return node_w_; }
  const std::vector<double>& cell_weights() const { return cell_w_; }

  double ball_volume() const;          ///< |B_R| in closed form
  double quadrature_volume() const;    ///< Σ node weights
  double sphere_area() const { return sigma_; }  ///< σ_{N-1}, area of the unit sphere

  static double unit_ball_volume(int N);
  static double unit_sphere_area(int N);

 private:
  double R_;
  int M_;
  int N_;
  double h_;
  double sigma_;
  std::vector<double> node_w_;  ///< size M+1
  std::vector<double> cell_w_;  ///< size M
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double R, int M, int N);

/// Radial grid function with the Dirichlet condition u(R) = 0 held exactly.
class RadialFunction {
 public:
  RadialFunction() = default;  ///< empty; assign before use
  explicit RadialFunction(GridPtr grid);
  RadialFunction(GridPtr grid, std::vector<double> values);

  template <typename F>
  static RadialFunction from(GridPtr grid, F&& f) {
    RadialFunction u(grid);
    for (int i = 0; i < grid->M(); ++i) u.values_[i] = f(grid->node(i));
    u.values_[grid->M()] = 0.0;
    return u;
  }

  const RadialGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }

  void enforce_dirichlet() { values_.back() = 0.0; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace nnls
