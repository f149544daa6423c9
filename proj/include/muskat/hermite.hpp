#pragma once

// Piecewise Hermite interpolation on one interval of width h, t = (x - x0)/h.

#include <algorithm>
#include <cmath>
#include <utility>

namespace muskat::hermite {

struct ValueSlope {
  double value;
  double slope;
};

/// Quintic through (y, y', y'') at both ends. Returns p(x) and p'(x).
inline ValueSlope quintic(double t, double h, double y0, double d0, double s0, double y1, double d1,
                          double s1) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double m0 = d0 * h, m1 = d1 * h, c0 = s0 * h * h, c1 = s1 * h * h;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 0.5 * t3 - t4 + 0.5 * t5;
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
  const double g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
  const double g2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
  const double g3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
  const double g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
  const double g5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
  return {h0 * y0 + h1 * m0 + h2 * c0 + h3 * c1 + h4 * m1 + h5 * y1,
          (g0 * y0 + g1 * m0 + g2 * c0 + g3 * c1 + g4 * m1 + g5 * y1) / h};
}

/// Cumulative integral over consecutive nodes with spacing h, using the
/// endpoint-corrected trapezoid rule
///   int_{x_i}^{x_{i+1}} q = h (q_i + q_{i+1}) / 2 + h^2 (q'_i - q'_{i+1}) / 12,
/// which is exact for cubics.
inline double corrected_trapezoid(double h, double q0, double dq0, double q1, double dq1) {
  return 0.5 * h * (q0 + q1) + h * h * (dq0 - dq1) / 12.0;
}

/// Solve P(t) = target for t in [0, 1] where P is monotone increasing with
/// P(0) <= target <= P(1); safeguarded Newton.
template <class P>
double invert_monotone(P&& p, double target, double tol = 1e-15) {
  double lo = 0.0, hi = 1.0, t = 0.5;
  {
    const auto a = p(0.0), b = p(1.0);
    const double span = b.value - a.value;
    if (span > 0.0) t = std::clamp((target - a.value) / span, 0.0, 1.0);
  }
  for (int it = 0; it < 100; ++it) {
    const auto v = p(t);
    const double r = v.value - target;
    if (r > 0.0) hi = t; else lo = t;
    double next = (v.slope > 0.0) ? t - r / v.slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= tol) return next;
    t = next;
  }
  return t;
}

}  // namespace muskat::hermite
