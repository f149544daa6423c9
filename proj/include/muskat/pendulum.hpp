#pragma once

// Correspondence between even steady profiles and odd pendulum motions
//   theta'' + lambda sin(theta) = 0,  |theta| < pi/2,  theta(0) = 0,
// through the arc-length parametrisation of the interface: theta(s) is the
// tangent angle at arc length s, theta'(s) = -lambda f(z(s)).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "muskat/branch.hpp"
#include "muskat/errors.hpp"
#include "muskat/hermite.hpp"
#include "muskat/ivp.hpp"
#include "muskat/rk45.hpp"

namespace muskat {

struct PendulumSample {
  double s;
  double theta;
  double theta_prime;
};

/// Uniform samples s_j = j * period_L / n over one period.
struct PendulumTrajectory {
  double lambda = 1.0;
  double period_L = 2.0 * std::numbers::pi;
  std::vector<PendulumSample> samples;

  std::size_t size() const { return samples.size(); }
  double spacing() const { return period_L / static_cast<double>(samples.size()); }
};

/// theta'^2 / 2 - lambda cos(theta)
inline double pendulum_energy(const PendulumSample& p, double lambda) {
  return 0.5 * p.theta_prime * p.theta_prime - lambda * std::cos(p.theta);
}

/// Minimum distance of |theta| to pi/2 accepted by from_pendulum.
inline constexpr double kTangentMargin = 1e-6;

namespace detail {

/// Index i with knots[i] <= v < knots[i+1], clamped to [0, knots.size()-2].
inline std::size_t locate(const std::vector<double>& knots, double v) {
  auto it = std::upper_bound(knots.begin(), knots.end(), v);
  std::ptrdiff_t i = (it - knots.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(knots.size()) - 2));
}

}  // namespace detail

/// Even profile -> pendulum trajectory. Arc length p(x) is accumulated with
/// the endpoint-corrected trapezoid rule (p' = sqrt(1+f'^2), p'' from the
/// equation) and inverted on each cell through its quintic Hermite
/// interpolant, which is monotone because p' >= 1.
inline PendulumTrajectory to_pendulum(const SolutionProfile& prof, std::size_t n_samples = 512) {
  if (prof.parity != Parity::even) throw ParityError("to_pendulum: profile must be even");
  const double scale = std::max(1.0, std::abs(prof.alpha));
  if (parity_defect(prof, 1.0) > 1e-9 * scale) throw ParityError("to_pendulum: samples are not even");
  if (n_samples < 4) throw DomainError("to_pendulum: need at least 4 samples");
  const std::size_t n = prof.size();
  const double h = prof.spacing();
  const double lam = prof.lambda;

  auto node = [&](std::size_t i) -> const State& { return prof.samples[i % n]; };
  std::vector<double> q(n + 1), dq(n + 1), f2(n + 1), f3(n + 1), p(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const State& v = node(i);
    f2[i] = second_derivative(lam, v.f, v.g);
    f3[i] = third_derivative(lam, v.f, v.g);
    q[i] = std::hypot(1.0, v.g);
    dq[i] = v.g * f2[i] / q[i];
  }
  p[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) p[i + 1] = p[i] + hermite::corrected_trapezoid(h, q[i], dq[i], q[i + 1], dq[i + 1]);

  PendulumTrajectory out;
  out.lambda = lam;
  out.period_L = p[n];
  out.samples.resize(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double s = out.period_L * static_cast<double>(j) / static_cast<double>(n_samples);
    const std::size_t i = detail::locate(p, s);
    const double t = hermite::invert_monotone(
        [&](double tt) {
          const auto v = hermite::quintic(tt, h, p[i], q[i], dq[i], p[i + 1], q[i + 1], dq[i + 1]);
          return hermite::ValueSlope{v.value, v.slope * h};
        },
        s);
    const State& a = node(i);
    const State& b = node(i + 1);
    const double f = hermite::quintic(t, h, a.f, a.g, f2[i], b.f, b.g, f2[i + 1]).value;
    const double fp = hermite::quintic(t, h, a.g, f2[i], f3[i], b.g, f2[i + 1], f3[i + 1]).value;
    out.samples[j] = {s, std::atan(fp), -lam * f};
  }
  return out;
}

/// Pendulum trajectory -> even profile with period T = int_0^L cos(theta).
/// z(s) = int_0^s cos(theta) is accumulated and inverted like the arc length
/// in to_pendulum; f(x) = -theta'(0)/lambda + int_0^x tan(theta(p(t))) dt.
inline SolutionProfile from_pendulum(const PendulumTrajectory& tr, std::size_t n_samples = 512) {
  const std::size_t m = tr.size();
  if (m < 4 || n_samples < 4) throw DomainError("from_pendulum: need at least 4 samples");
  const double lam = tr.lambda;
  double sup = 0.0;
  for (const auto& v : tr.samples) sup = std::max(sup, std::abs(v.theta));
  if (sup >= 0.5 * std::numbers::pi - kTangentMargin) {
    throw SingularityError("from_pendulum: |theta| reaches within " + std::to_string(kTangentMargin) +
                           " of pi/2");
  }
  const double hs = tr.spacing();
  auto node = [&](std::size_t j) -> const PendulumSample& { return tr.samples[j % m]; };
  std::vector<double> c(m + 1), dc(m + 1), th2(m + 1), th3(m + 1), z(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const auto& v = node(j);
    c[j] = std::cos(v.theta);
    dc[j] = -std::sin(v.theta) * v.theta_prime;
    th2[j] = -lam * std::sin(v.theta);
    th3[j] = -lam * std::cos(v.theta) * v.theta_prime;
  }
  z[0] = 0.0;
  for (std::size_t j = 0; j < m; ++j) z[j + 1] = z[j] + hermite::corrected_trapezoid(hs, c[j], dc[j], c[j + 1], dc[j + 1]);

  SolutionProfile out;
  out.lambda = lam;
  out.period = z[m];
  out.parity = Parity::even;
  out.samples.resize(n_samples);
  const double hx = out.period / static_cast<double>(n_samples);

  // tan(theta(p(x))) and its x-derivative theta' / cos^3(theta) at the output nodes
  std::vector<double> w(n_samples + 1), dw(n_samples + 1);
  for (std::size_t k = 0; k <= n_samples; ++k) {
    const double x = hx * static_cast<double>(k);
    const std::size_t j = detail::locate(z, x);
    const double t = hermite::invert_monotone(
        [&](double tt) {
          const auto v = hermite::quintic(tt, hs, z[j], c[j], dc[j], z[j + 1], c[j + 1], dc[j + 1]);
          return hermite::ValueSlope{v.value, v.slope * hs};
        },
        x);
    const auto& a = node(j);
    const auto& b = node(j + 1);
    const double th = hermite::quintic(t, hs, a.theta, a.theta_prime, th2[j], b.theta, b.theta_prime, th2[j + 1]).value;
    const double thp = hermite::quintic(t, hs, a.theta_prime, th2[j], th3[j], b.theta_prime, th2[j + 1], th3[j + 1]).value;
    const double ct = std::cos(th);
    w[k] = std::tan(th);
    dw[k] = thp / (ct * ct * ct);
  }
  double f = -tr.samples.front().theta_prime / lam;
  double max_slope = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    out.samples[k] = {hx * static_cast<double>(k), f, w[k]};
    max_slope = std::max(max_slope, std::abs(w[k]));
    f += hermite::corrected_trapezoid(hx, w[k], dw[k], w[k + 1], dw[k + 1]);
  }
  out.alpha = max_slope;
  return out;
}

/// Period of the pendulum attached to the 2pi branch point lambda:
///   L = (2/sqrt(lambda)) int_{-pi/2}^{pi/2} dphi / sqrt(1 - k^2 sin^2 phi),
///   k = sin(arctan(alpha(lambda)) / 2).
inline double pendulum_period_from_alpha(double lambda, double alpha, const quad::Options& qo = {}) {
  const double k = std::sin(0.5 * std::atan(alpha));
  auto integrand = [k](double phi) {
    const double s = std::sin(phi);
    return 1.0 / std::sqrt(1.0 - k * k * s * s);
  };
  const double half_pi = 0.5 * std::numbers::pi;
  return 2.0 / std::sqrt(lambda) * quad::integrate(integrand, -half_pi, half_pi, qo).value;
}

inline double pendulum_period(double lambda, const NumericOptions& opt = {}) {
  const double alpha = alpha_of_lambda(lambda, opt.root_tol, opt.alpha_max, opt.quad);
  return pendulum_period_from_alpha(lambda, alpha, opt.quad);
}

/// Branch point whose pendulum has period L (self-consistency solve; the
/// period is strictly decreasing in lambda). Returns lambda.
inline double lambda_of_pendulum_period(double L, const quad::Options& qo = {}) {
  auto period_u = [&](double u) {
    const double lam = lambda_of_u(u, qo);
    return pendulum_period_from_alpha(lam, alpha_of_one_minus_beta(u), qo);
  };
  const double lo = period_u(0.0), hi = period_u(1.0);
  if (!(L >= lo) || !(L < hi)) {
    throw OutOfRangeError("lambda_of_pendulum_period: L must lie in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ")");
  }
  const double u = roots::brent([&](double uu) { return period_u(uu) - L; }, 0.0, 1.0, 1e-16);
  return lambda_of_u(u, qo);
}

/// Direct integration of the pendulum from theta(0) = 0, theta'(0) = omega0,
/// extended from the quarter period by its symmetries. Independent of the
/// profile route; used to cross-check the correspondence.
inline PendulumTrajectory integrate_pendulum(double lambda, double omega0, std::size_t n_samples = 512,
                                             double tol = 1e-12) {
  detail::check_lambda(lambda, "integrate_pendulum");
  if (n_samples < 4) throw DomainError("integrate_pendulum: need at least 4 samples");
  PendulumTrajectory out;
  out.lambda = lambda;
  out.samples.resize(n_samples);
  if (omega0 == 0.0) {
    out.period_L = 2.0 * std::numbers::pi / std::sqrt(lambda);
    for (std::size_t j = 0; j < n_samples; ++j) out.samples[j] = {out.period_L * j / n_samples, 0.0, 0.0};
    return out;
  }
  if (omega0 * omega0 >= 2.0 * lambda) throw DomainError("integrate_pendulum: rotating motion (|theta| reaches pi)");
  auto rhs = [lambda](double, const ode::Vec<2>& y) { return ode::Vec<2>{y[1], -lambda * std::sin(y[0])}; };
  const double sgn = omega0 > 0.0 ? 1.0 : -1.0;
  auto event = [sgn](const ode::Vec<2>& y) { return sgn * y[1]; };
  ode::Options opt;
  opt.tol = tol;
  opt.initial_step = 1e-3;
  opt.event_tol = 1e-14;
  const double horizon = 100.0 / std::sqrt(lambda);
  auto res = ode::integrate<2>(rhs, 0.0, ode::Vec<2>{0.0, omega0}, horizon, opt, &event);
  if (!res.event_x) throw EventNotFoundError("integrate_pendulum: turning point not found");
  const double quarter = *res.event_x;
  out.period_L = 4.0 * quarter;
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double s = out.period_L * static_cast<double>(j) / static_cast<double>(n_samples);
    ode::Vec<2> y{};
    double sign_th = 1.0, sign_om = 1.0;
    if (s <= quarter) {
      y = res.path.at(rhs, s);
    } else if (s <= 2.0 * quarter) {
      y = res.path.at(rhs, 2.0 * quarter - s);
      sign_om = -1.0;
    } else if (s <= 3.0 * quarter) {
      y = res.path.at(rhs, s - 2.0 * quarter);
      sign_th = sign_om = -1.0;
    } else {
      y = res.path.at(rhs, 4.0 * quarter - s);
      sign_th = -1.0;
    }
    out.samples[j] = {s, sign_th * y[0], sign_om * y[1]};
  }
  return out;
}

}  // namespace muskat
