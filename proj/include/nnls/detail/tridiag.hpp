#pragma once

#include <vector>

namespace nnls::detail {

/// Thomas solve of a tridiagonal system.  `sub` and `sup` have size n-1.
/// Overwrites nothing; returns the solution.
inline std::vector<double> solve_tridiag(const std::vector<double>& sub,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& sup,
                                         const std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
  c[0] = sup.empty() ? 0.0 : sup[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - sub[i - 1] * c[i - 1];
    c[i] = (i < n - 1) ? sup[i] / m : 0.0;
    d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace nnls::detail
