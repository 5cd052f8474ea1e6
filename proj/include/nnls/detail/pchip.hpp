#pragma once

#include <algorithm>
#include <vector>

namespace nnls::detail {

/// Fritsch-Carlson monotone cubic slopes for a strictly increasing abscissa.
inline std::vector<double> pchip_slopes(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> delta(n - 1);
  for (int i = 0; i < n - 1; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (int i = 1; i < n - 1; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  for (int i : {0, n - 1}) {
    const double del = (i == 0) ? delta[0] : delta[n - 2];
    if (d[i] * del <= 0.0)
      d[i] = 0.0;
    else if (std::abs(d[i]) > 3.0 * std::abs(del))
      d[i] = 3.0 * del;
  }
  return d;
}

struct PchipSample {
  double value;
  double deriv;
};

/// Evaluate the cubic Hermite interpolant.  Left of the table the value is
/// held constant (radial symmetry), right of the table it is zero.
inline PchipSample pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& d, double s) {
  const int n = static_cast<int>(x.size());
  if (s <= x.front()) return {y.front(), 0.0};
  if (s >= x.back()) return {0.0, 0.0};
  int lo = static_cast<int>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
  lo = std::clamp(lo, 0, n - 2);
  const double hseg = x[lo + 1] - x[lo];
  const double t = (s - x[lo]) / hseg;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * y[lo] + (t3 - 2 * t2 + t) * hseg * d[lo] +
                   (-2 * t3 + 3 * t2) * y[lo + 1] + (t3 - t2) * hseg * d[lo + 1];
  const double dv = (6 * t2 - 6 * t) / hseg * y[lo] + (3 * t2 - 4 * t + 1) * d[lo] +
                    (-6 * t2 + 6 * t) / hseg * y[lo + 1] + (3 * t2 - 2 * t) * d[lo + 1];
  return {v, dv};
}

}  // namespace nnls::detail
