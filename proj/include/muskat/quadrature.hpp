#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace muskat::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    // Newton on P_n from the Chebyshev-like initial guess; symmetric pairs.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // recompute derivative at the converged node
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

/// Shared 16-point table; immutable after construction.
inline const GaussLegendre& gauss_legendre_16() {
  static const GaussLegendre rule(16);
  return rule;
}

struct Options {
  int panels = 4;            ///< initial panel count (x 16 points = 64-point rule)
  int max_refinements = 6;   ///< panel doublings allowed after the first pass
  double abs_tol = 1e-12;
};

struct Result {
  double value;
  double error_estimate;
  int panels;
};

/// Composite 16-point Gauss-Legendre rule on `panels` equal panels.
template <class F>
double composite(F&& f, double a, double b, int panels) {
  const auto& gl = gauss_legendre_16();
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * f(mid + half * gl.nodes[k]);
    sum += s * half;
  }
  return sum;
}

/// Composite rule with successive panel doubling; the difference between the
/// last two passes is the error estimate. Intended for smooth integrands.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  int panels = opt.panels;
  double coarse = composite(f, a, b, panels);
  double fine = coarse;
  double err = 0.0;
  for (int r = 0; r <= opt.max_refinements; ++r) {
    panels *= 2;
    fine = composite(f, a, b, panels);
    err = std::abs(fine - coarse);
    if (err <= opt.abs_tol) break;
    coarse = fine;
  }
  return {fine, err, panels};
}

}  // namespace muskat::quad
