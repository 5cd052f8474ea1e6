#include "nnls/grid.hpp"

#include <cmath>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

namespace {

// Binomial coefficients up to the dimensions we support.
double binom(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
  return r;
}

// ∫_{-a}^{a} t^j (t+c)^{N-1} dt, expanded around the interval center c so the
// distant cells do not cancel catastrophically.
double centered_moment(int j, double a, double c, int N) {
  double sum = 0.0;
  for (int m = 0; m <= N - 1; ++m) {
    const int k = j + m;
    if (k % 2 != 0) continue;  // odd powers integrate to zero
    sum += binom(N - 1, m) * std::pow(c, N - 1 - m) * 2.0 * std::pow(a, k + 1) / (k + 1);
  }
  return sum;
}

}  // namespace

double RadialGrid::unit_sphere_area(int N) {
  return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

double RadialGrid::unit_ball_volume(int N) { return unit_sphere_area(N) / N; }

RadialGrid::RadialGrid(double R, int M, int N) : R_(R), M_(M), N_(N) {
  if (!(R > 0.0) || !std::isfinite(R)) fail(ErrorCode::ConfigInvalid, "grid radius must be positive");
  if (N < 2) fail(ErrorCode::ConfigInvalid, "grid dimension must be >= 2");
  if (M < 16 || M % 2 != 0) {
    std::ostringstream msg;
    msg << "node count M must be even and >= 16 (got " << M << ")";
    fail(ErrorCode::ConfigInvalid, msg.str());
  }
  h_ = R / M;
  sigma_ = unit_sphere_area(N);
  node_w_.assign(M + 1, 0.0);
  cell_w_.assign(M, 0.0);

  for (int i = 0; i < M; ++i) {
    const double c = 0.5 * (node(i) + node(i + 1));
    cell_w_[i] = sigma_ * centered_moment(0, 0.5 * h_, c, N);
  }

  for (int k = 0; k + 2 <= M; k += 2) {
    const double c = node(k + 1);
    const double P0 = centered_moment(0, h_, c, N);
    const double P1 = centered_moment(1, h_, c, N);
    const double P2 = centered_moment(2, h_, c, N);
    const double w0 = (P2 - h_ * P1) / (2.0 * h_ * h_);
    const double w1 = (h_ * h_ * P0 - P2) / (h_ * h_);
    const double w2 = (P2 + h_ * P1) / (2.0 * h_ * h_);
    if (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) {
      node_w_[k] += sigma_ * w0;
      node_w_[k + 1] += sigma_ * w1;
      node_w_[k + 2] += sigma_ * w2;
    } else {
      // linear fallback on the two cells of the pair
      for (int i = k; i < k + 2; ++i) {
        const double cc = 0.5 * (node(i) + node(i + 1));
        const double Q0 = centered_moment(0, 0.5 * h_, cc, N);
        const double Q1 = centered_moment(1, 0.5 * h_, cc, N);
        node_w_[i] += sigma_ * (0.5 * h_ * Q0 - Q1) / h_;
        node_w_[i + 1] += sigma_ * (0.5 * h_ * Q0 + Q1) / h_;
      }
    }
  }
}

double RadialGrid::ball_volume() const {
  return unit_ball_volume(N_) * std::pow(R_, N_);
}

double RadialGrid::quadrature_volume() const {
  double sum = 0.0;
  for (double w : node_w_) sum += w;
  return sum;
}

GridPtr make_grid(double R, int M, int N) { return std::make_shared<RadialGrid>(R, M, N); }

RadialFunction::RadialFunction(GridPtr grid)
    : grid_(std::move(grid)), values_(grid_->M() + 1, 0.0) {}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_->M() + 1)
    fail(ErrorCode::ConfigInvalid, "value count does not match grid");
  values_.back() = 0.0;
}

}  // namespace nnls
