#pragma once

// Global branches of odd (and, by translation, even) steady fingers:
// alpha(lambda), the admissibility threshold lambda_h, mode-l scaling, the
// even translation and a numerical check of the small-amplitude expansion.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "muskat/errors.hpp"
#include "muskat/hermite.hpp"
#include "muskat/ivp.hpp"
#include "muskat/period.hpp"
#include "muskat/roots.hpp"
#include "muskat/special.hpp"

namespace muskat {

struct PhysicalParams {
  double grav = 1.0;
  double rho_plus = 1.0;
  double rho_minus = 0.0;
  double h = 1.0;  ///< cell half-height

  /// g (rho_+ - rho_-)
  double drive() const { return grav * (rho_plus - rho_minus); }

  void validate() const {
    if (!(grav > 0.0)) throw DomainError("grav must be positive");
    if (!(h > 0.0)) throw DomainError("h must be positive");
    if (!(rho_plus > rho_minus)) {
      throw DomainError("rho_plus must exceed rho_minus (heavier fluid on top)");
    }
  }
};

/// Tolerances shared by the branch computations.
struct NumericOptions {
  double ode_tol = 1e-10;
  double root_tol = 1e-12;
  double alpha_max = 1e8;
  quad::Options quad{};
};

inline double gamma_of_lambda(const PhysicalParams& p, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("gamma_of_lambda: lambda must be positive");
  return p.drive() / lambda;
}

inline double lambda_of_gamma(const PhysicalParams& p, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("lambda_of_gamma: gamma must be positive");
  return p.drive() / gamma;
}

/// Bifurcation point of mode l on the trivial branch: g (rho_+ - rho_-) / l^2.
inline double gamma_bar(const PhysicalParams& p, int l) {
  if (l < 1) throw DomainError("gamma_bar: mode number must be >= 1");
  return p.drive() / (static_cast<double>(l) * l);
}

/// gamma_* = g (rho_+ - rho_-) / lambda_*
inline double gamma_star(const PhysicalParams& p) { return p.drive() / constants().lambda_star; }

// ---------------------------------------------------------------------------
// alpha(lambda)

/// 1 - beta(alpha(lambda)). The root is taken in u = 1 - beta, where theta
/// is smooth and strictly decreasing with a derivative bounded away from 0.
inline double u_of_lambda(double lambda, double tol = 1e-12, double alpha_max = 1e8,
                          const quad::Options& qo = {}) {
  const double ls = constants().lambda_star;
  if (!(lambda > ls) || !(lambda <= 1.0)) {
    throw OutOfRangeError("alpha_of_lambda: lambda = " + std::to_string(lambda) +
                          " outside (lambda_*, 1] = (" + std::to_string(ls) + ", 1]");
  }
  if (!(tol > 0.0)) throw DomainError("alpha_of_lambda: tol must be positive");
  const double target = 0.5 * std::numbers::pi * std::sqrt(lambda);
  auto f = [&](double u) { return unit_theta(u, qo) - target; };
  const double f0 = f(0.0);
  if (f0 <= 8.0 * std::numeric_limits<double>::epsilon()) return 0.0;  // lambda == 1
  const double u_max = one_minus_beta(alpha_max);
  if (f(u_max) > 0.0) {
    throw SaturationError("alpha_of_lambda: alpha exceeds alpha_max = " + std::to_string(alpha_max) +
                          " at lambda = " + std::to_string(lambda) + " (too close to lambda_*)");
  }
  // du/dalpha = alpha beta^3 converts the alpha tolerance; floor at round-off.
  return roots::brent(f, 0.0, u_max, 1e-17);
}

/// Unique alpha >= 0 with theta(lambda, alpha) = pi/2, lambda in (lambda_*, 1].
inline double alpha_of_lambda(double lambda, double tol = 1e-12, double alpha_max = 1e8,
                              const quad::Options& qo = {}) {
  return alpha_of_one_minus_beta(u_of_lambda(lambda, tol, alpha_max, qo));
}

/// lambda on the odd 2pi branch for given u = 1 - beta: (2 unit_theta(u) / pi)^2.
inline double lambda_of_u(double u, const quad::Options& qo = {}) {
  const double t = 2.0 * unit_theta(u, qo) / std::numbers::pi;
  return t * t;
}

// ---------------------------------------------------------------------------
// profiles

/// Odd 2pi-periodic solution f_lambda with f'(0) = alpha(lambda) >= 0.
inline SolutionProfile profile_at(double lambda, std::size_t n_samples = 512, const NumericOptions& opt = {}) {
  const double alpha = alpha_of_lambda(lambda, opt.root_tol, opt.alpha_max, opt.quad);
  if (alpha == 0.0) return zero_profile(lambda, 2.0 * std::numbers::pi, n_samples);
  return extend_odd_periodic(quarter_profile(lambda, alpha, opt.ode_tol), n_samples);
}

/// Samples per period at which the eighth-order residual resolves a profile
/// of maximal slope alpha: 1024 times the next power of two >= alpha.
inline std::size_t resolving_samples(double alpha, std::size_t minimum = 512) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("resolving_samples: alpha must be finite");
  std::size_t n = 1024;
  while (static_cast<double>(n) < 1024.0 * alpha) n *= 2;
  return std::max(n, minimum);
}

/// x -> f(l x) / l: solution for lambda l^2 with period / l.
inline SolutionProfile scale_profile(const SolutionProfile& s, int l) {
  if (l < 1) throw DomainError("scale_profile: mode number must be >= 1");
  SolutionProfile out = s;
  const double dl = l;
  out.lambda = s.lambda * dl * dl;
  out.period = s.period / dl;
  for (auto& v : out.samples) {
    v.x /= dl;
    v.f /= dl;
  }
  return out;
}

/// Largest |f(-x) - sign f(x)| over mirrored samples x_i, x_{n-i}.
inline double parity_defect(const SolutionProfile& s, double sign) {
  const std::size_t n = s.size();
  double d = 0.0;
  for (std::size_t i = 1; i < n; ++i) d = std::max(d, std::abs(s.samples[n - i].f - sign * s.samples[i].f));
  if (n > 0 && sign < 0.0) d = std::max(d, std::abs(s.samples[0].f));
  return d;
}

/// x -> f(x + offset), resampled on the same uniform grid. Offsets that are
/// multiples of the spacing are exact index shifts; otherwise values come from
/// quintic Hermite interpolation with f'' from the equation.
inline SolutionProfile shift_profile(const SolutionProfile& s, double offset) {
  const std::size_t n = s.size();
  SolutionProfile out = s;
  out.parity = Parity::none;
  if (n == 0) return out;
  const double h = s.spacing();
  double k = std::fmod(offset / h, static_cast<double>(n));
  if (k < 0.0) k += static_cast<double>(n);
  const double kr = std::round(k);
  if (std::abs(k - kr) < 1e-9) {
    const std::size_t shift = static_cast<std::size_t>(kr) % n;
    for (std::size_t i = 0; i < n; ++i) {
      const State& src = s.samples[(i + shift) % n];
      out.samples[i] = {s.samples[i].x, src.f, src.g};
    }
    return out;
  }
  const std::size_t base = static_cast<std::size_t>(std::floor(k));
  const double t = k - std::floor(k);
  for (std::size_t i = 0; i < n; ++i) {
    const State& a = s.samples[(i + base) % n];
    const State& b = s.samples[(i + base + 1) % n];
    const double fa2 = second_derivative(s.lambda, a.f, a.g);
    const double fb2 = second_derivative(s.lambda, b.f, b.g);
    const auto f = hermite::quintic(t, h, a.f, a.g, fa2, b.f, b.g, fb2);
    const auto g = hermite::quintic(t, h, a.g, fa2, third_derivative(s.lambda, a.f, a.g), b.g, fb2,
                                    third_derivative(s.lambda, b.f, b.g));
    out.samples[i] = {s.samples[i].x, f.value, g.value};
  }
  return out;
}

/// Even member of the mode-l branch: f(. + pi / (2 l)).
inline SolutionProfile translate_even(const SolutionProfile& s, int l) {
  if (l < 1) throw DomainError("translate_even: mode number must be >= 1");
  if (s.parity != Parity::odd) throw ParityError("translate_even: input profile must be odd");
  const double scale = std::max(1.0, std::abs(s.alpha));
  if (parity_defect(s, -1.0) > 1e-10 * scale) throw ParityError("translate_even: samples are not odd");
  const double expected = 2.0 * std::numbers::pi / l;
  if (std::abs(s.period - expected) > 1e-7 * expected) {
    throw ParityError("translate_even: minimal period " + std::to_string(s.period) + " is not 2pi/" +
                      std::to_string(l));
  }
  SolutionProfile out = shift_profile(s, 0.5 * std::numbers::pi / l);
  out.parity = Parity::even;
  return out;
}

inline SolutionProfile negate(SolutionProfile s) {
  s.alpha = -s.alpha;
  for (auto& v : s.samples) {
    v.f = -v.f;
    v.g = -v.g;
  }
  return s;
}

struct Residual {
  double ode_residual_max;
  double mean_abs;
};

/// Max of |f''/(1+f'^2)^{3/2} + lambda f| with f'' from an eighth-order
/// periodic central difference of the f' samples, and |mean f| by the
/// (periodic) trapezoid rule.
inline Residual residual(const SolutionProfile& s) {
  const std::size_t n = s.size();
  if (n < 9) throw DomainError("residual: need at least 9 samples");
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const double h = s.spacing();
  double worst = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) d += c[k - 1] * (s.samples[(i + k) % n].g - s.samples[(i + n - k) % n].g);
    d /= h;
    const double g = s.samples[i].g;
    const double sq = 1.0 + g * g;
    worst = std::max(worst, std::abs(d / (sq * std::sqrt(sq)) + s.lambda * s.samples[i].f));
    sum += s.samples[i].f;
  }
  return {worst, std::abs(sum / static_cast<double>(n))};
}

// ---------------------------------------------------------------------------
// threshold and regimes

enum class RegimeKind { touches_boundary, both_blowup, slope_blowup };

inline const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::touches_boundary: return "TOUCHES_BOUNDARY";
    case RegimeKind::both_blowup: return "BOTH_BLOWUP";
    default: return "SLOPE_BLOWUP";
  }
}

inline const char* roman(RegimeKind k) {
  switch (k) {
    case RegimeKind::touches_boundary: return "(i)";
    case RegimeKind::both_blowup: return "(ii)";
    default: return "(iii)";
  }
}

struct Regime {
  RegimeKind kind;
  double lambda_h;  ///< lower end of the admissible window, l = 1 coordinates
  double gamma_h;
};

/// Relative band for deciding h == h_*.
inline constexpr double kHeightEqualityBand = 1e-9;

/// Admissibility threshold: amplitude(lambda_h) = h when h < h_*, else lambda_*.
inline Regime lambda_h(const PhysicalParams& p, double tol = 1e-12, const quad::Options& qo = {}) {
  p.validate();
  const auto& k = constants();
  const double rel = (p.h - k.h_star) / k.h_star;
  if (std::abs(rel) <= kHeightEqualityBand) {
    return {RegimeKind::both_blowup, k.lambda_star, gamma_of_lambda(p, k.lambda_star)};
  }
  if (rel > 0.0) return {RegimeKind::slope_blowup, k.lambda_star, gamma_of_lambda(p, k.lambda_star)};
  // amplitude^2 = 2 u / lambda(u) increases from 0 (u = 0) to h_*^2 (u = 1)
  auto f = [&](double u) { return 2.0 * u / lambda_of_u(u, qo) - p.h * p.h; };
  const double u = roots::brent(f, 0.0, 1.0, std::min(tol, 1e-15));
  const double lam = lambda_of_u(u, qo);
  return {RegimeKind::touches_boundary, lam, gamma_of_lambda(p, lam)};
}

/// Regime of the mode-l branch: the scaled profile f(l.)/l stays below h iff
/// the base profile stays below l h.
inline Regime mode_regime(const PhysicalParams& p, int l, double tol = 1e-12, const quad::Options& qo = {}) {
  if (l < 1) throw DomainError("mode number must be >= 1");
  PhysicalParams q = p;
  q.h = p.h * l;
  return lambda_h(q, tol, qo);
}

// ---------------------------------------------------------------------------
// branch tracing

struct BranchPoint {
  double lambda;          ///< l^2 * lambda_base
  double gamma;           ///< g (rho_+ - rho_-) / lambda
  double alpha;           ///< f'(0) = max slope (unchanged by scaling)
  double amplitude;       ///< max f of the scaled profile
  double quarter_period;  ///< theta(lambda_base, alpha) / l = pi / (2 l)
  int l;
  double lambda_base;
};

struct Branch {
  int l = 1;
  Parity parity = Parity::odd;
  Regime regime{};
  PhysicalParams params{};
  std::vector<BranchPoint> points;          ///< increasing lambda
  std::vector<double> truncated_lambdas;    ///< base grid nodes lost to saturation
  bool truncated() const { return !truncated_lambdas.empty(); }
};

enum class GridPolicy { graded, uniform };

/// Base-coordinate lambda grid on (lo, 1], open at lo, clustered toward lo for
/// the graded policy.
inline std::vector<double> branch_grid(double lo, int n_points, GridPolicy policy) {
  std::vector<double> g(n_points);
  for (int j = 1; j <= n_points; ++j) {
    const double t = static_cast<double>(j) / n_points;
    g[j - 1] = lo + (1.0 - lo) * (policy == GridPolicy::graded ? t * t : t);
  }
  g.back() = 1.0;
  return g;
}

inline BranchPoint branch_point(const PhysicalParams& p, int l, double lambda_base, const NumericOptions& opt) {
  const double u = u_of_lambda(lambda_base, opt.root_tol, opt.alpha_max, opt.quad);
  const double alpha = alpha_of_one_minus_beta(u);
  const double dl = l;
  BranchPoint bp{};
  bp.l = l;
  bp.lambda_base = lambda_base;
  bp.lambda = lambda_base * dl * dl;
  bp.gamma = gamma_of_lambda(p, bp.lambda);
  bp.alpha = alpha;
  bp.amplitude = max_amplitude_u(lambda_base, u) / dl;
  bp.quarter_period = unit_theta(u, opt.quad) / std::sqrt(lambda_base) / dl;
  return bp;
}

/// Sigma_l on n_points base grid nodes in (max(lambda_*, lambda_{l,h}), 1].
/// Nodes too close to lambda_* for the alpha cap are recorded as truncated.
inline Branch trace_branch(const PhysicalParams& p, int l, int n_points, const NumericOptions& opt = {},
                           GridPolicy policy = GridPolicy::graded) {
  p.validate();
  if (l < 1) throw DomainError("trace_branch: mode number must be >= 1");
  if (n_points < 2) throw DomainError("trace_branch: need at least 2 points");
  Branch b;
  b.l = l;
  b.params = p;
  b.regime = mode_regime(p, l, opt.root_tol, opt.quad);
  const auto grid = branch_grid(b.regime.lambda_h, n_points, policy);

  std::vector<BranchPoint> pts(grid.size());
  std::vector<char> ok(grid.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        pts[i] = branch_point(p, l, grid[i], opt);
        ok[i] = 1;
      } catch (const SaturationError&) {
        ok[i] = 0;
      }
    }
  };
  const unsigned n_threads = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (ok[i]) b.points.push_back(pts[i]);
    else b.truncated_lambdas.push_back(grid[i]);
  }
  return b;
}

/// Sampled profile of one branch point over its minimal period 2 pi / l.
inline SolutionProfile branch_profile(const BranchPoint& bp, std::size_t n_samples = 512,
                                      Parity parity = Parity::odd, const NumericOptions& opt = {}) {
  SolutionProfile s = scale_profile(profile_at(bp.lambda_base, n_samples, opt), bp.l);
  if (parity == Parity::even) s = translate_even(s, bp.l);
  return s;
}

// ---------------------------------------------------------------------------
// small-amplitude expansion

struct ExpansionFit {
  double coefficient;            ///< eps -> 0 extrapolation of (gamma - gamma_bar_l) / eps^2
  double expected;               ///< 3 g (rho_+ - rho_-) / 8
  std::vector<double> eps;
  std::vector<double> gamma;
  std::vector<double> ratio;     ///< (gamma(eps) - gamma_bar_l) / eps^2 per eps
};

/// Coefficient of cos(2 pi x / P) over one period P of an even profile.
inline double first_cosine_coefficient(const SolutionProfile& s) {
  const std::size_t n = s.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += s.samples[i].f * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return 2.0 * sum / static_cast<double>(n);
}

/// For each eps, the branch point whose even profile has leading cosine
/// coefficient eps; fits (gamma - gamma_bar_l)/eps^2 = c0 + c1 eps^2.
inline ExpansionFit expansion_check(const PhysicalParams& p, int l, const std::vector<double>& eps_list,
                                    std::size_t n_samples = 256, const NumericOptions& opt = {}) {
  p.validate();
  if (l < 1) throw DomainError("expansion_check: mode number must be >= 1");
  ExpansionFit fit{};
  fit.expected = 3.0 * p.drive() / 8.0;
  const double gbar = gamma_bar(p, l);
  auto coefficient_at = [&](double lambda_base) {
    BranchPoint bp = branch_point(p, l, lambda_base, opt);
    return first_cosine_coefficient(branch_profile(bp, n_samples, Parity::even, opt));
  };
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw DomainError("expansion_check: eps must be positive");
    double lo = 0.5;
    while (coefficient_at(lo) < eps) {
      lo = constants().lambda_star + 0.5 * (lo - constants().lambda_star);
      if (lo - constants().lambda_star < 1e-6) throw OutOfRangeError("expansion_check: eps too large");
    }
    const double lam = roots::brent([&](double lb) { return coefficient_at(lb) - eps; }, lo, 1.0, 1e-15);
    fit.eps.push_back(eps);
    fit.gamma.push_back(gamma_of_lambda(p, lam * l * l));
    fit.ratio.push_back((fit.gamma.back() - gbar) / (eps * eps));
  }
  const std::size_t m = fit.eps.size();
  if (m == 0) throw DomainError("expansion_check: empty eps list");
  if (m == 1) {
    fit.coefficient = fit.ratio[0];
    return fit;
  }
  // least squares in e2 = eps^2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = fit.eps[i] * fit.eps[i];
    sx += x;
    sy += fit.ratio[i];
    sxx += x * x;
    sxy += x * fit.ratio[i];
  }
  const double det = m * sxx - sx * sx;
  fit.coefficient = (sxx * sy - sx * sxy) / det;
  return fit;
}

// ---------------------------------------------------------------------------
// coexistence of neighbouring modes

struct CoexistenceLevel {
  int l;
  double gamma_lo;  ///< gamma_bar_l
  double gamma_hi;  ///< upper end shared by Sigma_l and Sigma_{l+1}
};

/// Levels l <= l_max with gamma_bar_{l+1} < gamma_bar_l < gamma_*/(l+1)^2 < gamma_*/l^2,
/// i.e. lambda_* < l^2/(l+1)^2. The window is further cut by the cell height.
inline std::vector<CoexistenceLevel> coexistence_levels(const PhysicalParams& p, int l_max,
                                                        double tol = 1e-12) {
  p.validate();
  if (l_max < 1) throw DomainError("coexistence_levels: l_max must be >= 1");
  const double gs = gamma_star(p);
  std::vector<CoexistenceLevel> out;
  for (int l = 1; l <= l_max; ++l) {
    const double l2 = static_cast<double>(l) * l, l12 = static_cast<double>(l + 1) * (l + 1);
    const bool chain = gamma_bar(p, l + 1) < gamma_bar(p, l) && gamma_bar(p, l) < gs / l12 && gs / l12 < gs / l2;
    if (!chain) continue;
    const double hi_l = mode_regime(p, l, tol).gamma_h / l2;
    const double hi_l1 = mode_regime(p, l + 1, tol).gamma_h / l12;
    const double hi = std::min(hi_l, hi_l1);
    if (hi > gamma_bar(p, l)) out.push_back({l, gamma_bar(p, l), hi});
  }
  return out;
}

}  // namespace muskat
