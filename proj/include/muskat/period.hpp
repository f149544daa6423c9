#pragma once

// Quarter period theta(lambda, alpha) of the odd solution of
//   f'' / (1 + f'^2)^{3/2} + lambda f = 0,  f(0) = 0,  f'(0) = alpha,
// i.e. the first positive zero of f'. With beta = 1/sqrt(1+alpha^2) and
// tau = sin(phi) the defining integral becomes
//   theta = sqrt(2/lambda) * int_0^{pi/2} g / sqrt(1 + g) dphi,
//   g = beta + (1 - beta) sin^2(phi) = 1 - (1 - beta) cos^2(phi),
// whose integrand is a smooth function of phi on the closed interval.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "muskat/errors.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/special.hpp"

namespace muskat {

struct PeriodQuery {
  double lambda;
  double alpha;
};

/// beta = 1 / sqrt(1 + alpha^2) without overflow for large alpha.
inline double beta_of_alpha(double alpha) { return 1.0 / std::hypot(1.0, alpha); }

/// 1 - beta, accurate for small alpha (no cancellation) and large alpha.
inline double one_minus_beta(double alpha) {
  const double s = std::hypot(1.0, alpha);
  return (alpha / s) * (alpha / (s + 1.0));
}

/// Inverse of one_minus_beta on [0, 1).
inline double alpha_of_one_minus_beta(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(u * (2.0 - u)) / (1.0 - u);
}

/// theta at lambda = 1 as a function of u = 1 - beta in [0, 1].
/// theta(lambda, alpha) = unit_theta(one_minus_beta(alpha)) / sqrt(lambda).
inline double unit_theta(double u, const quad::Options& opt = {}) {
  auto integrand = [u](double phi) {
    const double c = std::cos(phi);
    const double g = 1.0 - u * c * c;
    return g / std::sqrt(1.0 + g);
  };
  return std::numbers::sqrt2 * quad::integrate(integrand, 0.0, 0.5 * std::numbers::pi, opt).value;
}

namespace detail {
inline void check_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(who) + ": lambda must be positive, got " + std::to_string(lambda));
  }
}
}  // namespace detail

inline double theta(const PeriodQuery& q, const quad::Options& opt = {}) {
  detail::check_lambda(q.lambda, "theta");
  if (!(q.alpha >= 0.0)) throw DomainError("theta: alpha must be non-negative");
  return unit_theta(one_minus_beta(q.alpha), opt) / std::sqrt(q.lambda);
}

inline double theta(double lambda, double alpha, const quad::Options& opt = {}) {
  return theta(PeriodQuery{lambda, alpha}, opt);
}

/// alpha -> 0 limit: pi / (2 sqrt(lambda)).
inline double theta_limit_zero(double lambda) {
  detail::check_lambda(lambda, "theta_limit_zero");
  return 0.5 * std::numbers::pi / std::sqrt(lambda);
}

/// alpha -> infinity limit: B(3/4, 1/2) / (2 sqrt(2 lambda)).
inline double theta_limit_infinity(double lambda) {
  detail::check_lambda(lambda, "theta_limit_infinity");
  return constants().beta_3_4_1_2 / (2.0 * std::sqrt(2.0 * lambda));
}

/// d theta / d alpha, differentiated under the integral sign through beta:
/// d/dg [g (1+g)^{-1/2}] = (2+g) / (2 (1+g)^{3/2}), dg/dbeta = cos^2(phi),
/// dbeta/dalpha = -alpha beta^3.
inline double dtheta_dalpha(const PeriodQuery& q, const quad::Options& opt = {}) {
  detail::check_lambda(q.lambda, "dtheta_dalpha");
  if (!(q.alpha > 0.0)) throw DomainError("dtheta_dalpha: alpha must be positive");
  const double u = one_minus_beta(q.alpha);
  auto integrand = [u](double phi) {
    const double c2 = std::cos(phi) * std::cos(phi);
    const double g = 1.0 - u * c2;
    return (2.0 + g) / (2.0 * std::pow(1.0 + g, 1.5)) * c2;
  };
  const double b = beta_of_alpha(q.alpha);
  const double integral = quad::integrate(integrand, 0.0, 0.5 * std::numbers::pi, opt).value;
  return -std::sqrt(2.0 / q.lambda) * integral * q.alpha * b * b * b;
}

}  // namespace muskat
