#ifndef PHOTONGAIN_NUMUTIL_HPP
#define PHOTONGAIN_NUMUTIL_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace pg::numutil {

// Gauss-Legendre nodes/weights on [0, 1], by Newton iteration on the
// Legendre polynomial (standard Golub-free construction, adequate for
// the tensor quadratures used here).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(
    int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    // Initial guess: Chebyshev-like approximation to the i-th root.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 - t);  // map [-1,1] -> [0,1], reversed order is fine
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace pg::numutil

#endif  // PHOTONGAIN_NUMUTIL_HPP
