#pragma once

// Shooting integration of the capillarity equation as the first-order system
//   f' = g,  g' = -lambda f (1 + g^2)^{3/2},  (f, g)(0) = (0, alpha),
// location of the quarter period g = 0, and the odd periodic extension.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "muskat/errors.hpp"
#include "muskat/period.hpp"
#include "muskat/rk45.hpp"

namespace muskat {

struct State {
  double x;
  double f;
  double g;  ///< f'
};

enum class Parity { odd, even, none };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    default: return "none";
  }
}

/// Uniformly sampled profile over one period: samples[i].x = i * period / n.
struct SolutionProfile {
  double lambda = 1.0;
  double alpha = 0.0;
  double period = 2.0 * std::numbers::pi;
  Parity parity = Parity::odd;
  std::vector<State> samples;

  std::size_t size() const { return samples.size(); }
  double spacing() const { return period / static_cast<double>(samples.size()); }
};

/// Right-hand side of the capillarity system for a fixed lambda.
struct CapillarityRhs {
  double lambda;
  ode::Vec<2> operator()(double, const ode::Vec<2>& y) const {
    const double s = 1.0 + y[1] * y[1];
    return {y[1], -lambda * y[0] * s * std::sqrt(s)};
  }
};

/// f'' from the equation itself.
inline double second_derivative(double lambda, double f, double g) {
  const double s = 1.0 + g * g;
  return -lambda * f * s * std::sqrt(s);
}

/// Third derivative of f from differentiating the equation once.
inline double third_derivative(double lambda, double f, double g) {
  const double s = 1.0 + g * g;
  return -lambda * g * std::sqrt(s) * (s + 3.0 * f * second_derivative(lambda, f, g));
}

/// First integral 1/sqrt(1+g^2) - lambda f^2 / 2; equals beta along solutions.
inline double energy(const State& s, double lambda) {
  return 1.0 / std::hypot(1.0, s.g) - 0.5 * lambda * s.f * s.f;
}

/// Maximum of f_{lambda,alpha}: sqrt(2 (1 - beta) / lambda).
inline double max_amplitude(double lambda, double alpha) {
  detail::check_lambda(lambda, "max_amplitude");
  if (!(alpha >= 0.0)) throw DomainError("max_amplitude: alpha must be non-negative");
  return std::sqrt(2.0 * one_minus_beta(alpha) / lambda);
}

/// Amplitude parameterised by u = 1 - beta.
inline double max_amplitude_u(double lambda, double u) { return std::sqrt(2.0 * u / lambda); }

namespace detail {

inline void check_ivp_args(double lambda, double alpha, const char* who) {
  check_lambda(lambda, who);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError(std::string(who) + ": alpha must be finite and non-negative");
  }
}

inline ode::Options ivp_options(double alpha, double tol) {
  ode::Options opt;
  opt.tol = tol;
  // f grows like alpha x while g' ~ lambda f alpha^3: start small.
  opt.initial_step = 1e-3 / std::max(1.0, alpha);
  opt.max_step = 0.1;
  opt.event_tol = std::min(1e-13, tol);
  return opt;
}

inline std::vector<State> to_states(const ode::Trajectory<2>& path) {
  std::vector<State> out;
  out.reserve(path.x.size());
  for (std::size_t i = 0; i < path.x.size(); ++i) out.push_back({path.x[i], path.y[i][0], path.y[i][1]});
  return out;
}

}  // namespace detail

/// Adaptive trajectory on [0, x_end] (accepted steps only).
inline std::vector<State> integrate(double lambda, double alpha, double x_end, double tol = 1e-10) {
  detail::check_ivp_args(lambda, alpha, "integrate");
  if (!(x_end > 0.0)) throw DomainError("integrate: x_end must be positive");
  if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
  const CapillarityRhs rhs{lambda};
  const auto res = ode::integrate<2>(rhs, 0.0, ode::Vec<2>{0.0, alpha}, x_end, detail::ivp_options(alpha, tol));
  return detail::to_states(res.path);
}

/// Solution on [0, theta], from f = 0 up to the first zero of f'.
struct QuarterProfile {
  double lambda = 1.0;
  double alpha = 0.0;
  double theta_end = 0.0;
  std::vector<State> samples;  ///< accepted steps, last one at theta_end

  /// State at u in [0, theta_end], from the RK formula restarted at the
  /// preceding accepted step.
  State at(double u) const {
    if (alpha == 0.0) return {u, 0.0, 0.0};
    const auto y = path_.at(CapillarityRhs{lambda}, u);
    return {u, y[0], y[1]};
  }

  ode::Trajectory<2> path_;
};

/// Integrate until g = 0. The crossing exists for every alpha > 0; not
/// finding it before 4 * theta_limit_zero(lambda) means the integration failed.
inline QuarterProfile quarter_profile(double lambda, double alpha, double tol = 1e-10) {
  detail::check_ivp_args(lambda, alpha, "quarter_profile");
  if (!(alpha > 0.0)) throw DomainError("quarter_profile: alpha must be positive");
  const CapillarityRhs rhs{lambda};
  auto slope = [](const ode::Vec<2>& y) { return y[1]; };
  const double horizon = 4.0 * theta_limit_zero(lambda);
  auto res = ode::integrate<2>(rhs, 0.0, ode::Vec<2>{0.0, alpha}, horizon,
                               detail::ivp_options(alpha, tol), &slope);
  if (!res.event_x) {
    throw EventNotFoundError("quarter_period: f' did not vanish before x = " + std::to_string(horizon));
  }
  QuarterProfile q;
  q.lambda = lambda;
  q.alpha = alpha;
  q.theta_end = *res.event_x;
  q.samples = detail::to_states(res.path);
  q.path_ = std::move(res.path);
  return q;
}

inline double quarter_period(double lambda, double alpha, double tol = 1e-10) {
  return quarter_profile(lambda, alpha, tol).theta_end;
}

/// Flat profile (alpha = 0).
inline SolutionProfile zero_profile(double lambda, double period, std::size_t n_samples, Parity parity = Parity::odd) {
  SolutionProfile s;
  s.lambda = lambda;
  s.alpha = 0.0;
  s.period = period;
  s.parity = parity;
  s.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) s.samples[i] = {period * i / n_samples, 0.0, 0.0};
  return s;
}

/// Odd, 4 theta-periodic extension by reflection:
///   f(x)            on [0, theta]
///   f(2 theta - x)  on [theta, 2 theta]
///  -f(x - 2 theta)  on [2 theta, 3 theta]
///  -f(4 theta - x)  on [3 theta, 4 theta]
inline SolutionProfile extend_odd_periodic(const QuarterProfile& q, std::size_t n_samples = 512) {
  if (n_samples < 4) throw DomainError("extend_odd_periodic: need at least 4 samples");
  const double th = q.theta_end;
  SolutionProfile s;
  s.lambda = q.lambda;
  s.alpha = q.alpha;
  s.period = 4.0 * th;
  s.parity = Parity::odd;
  s.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = s.period * static_cast<double>(i) / static_cast<double>(n_samples);
    State v{};
    if (x <= th) {
      const State a = q.at(x);
      v = {x, a.f, a.g};
    } else if (x <= 2.0 * th) {
      const State a = q.at(2.0 * th - x);
      v = {x, a.f, -a.g};
    } else if (x <= 3.0 * th) {
      const State a = q.at(x - 2.0 * th);
      v = {x, -a.f, -a.g};
    } else {
      const State a = q.at(4.0 * th - x);
      v = {x, -a.f, a.g};
    }
    s.samples[i] = v;
  }
  return s;
}

}  // namespace muskat
