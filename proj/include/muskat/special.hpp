#pragma once

// Gamma/beta functions and the blow-up constants of the odd branch.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "muskat/errors.hpp"

namespace muskat {

/// ln Gamma(x) for x > 0. Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be a positive finite number, got " +
                      std::to_string(x));
  }
  constexpr double pi = std::numbers::pi;
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x); sin(pi x) > 0 on (0, 1/2).
    return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  }
  static constexpr std::array<double, 9> c = {
      0.99999999999980993227684700473478,  676.520368121885098567009190444019,
      -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
      -176.61502916214059906584551354,     12.507343278686904814458936853,
      -0.13857109526572011689554707,       9.984369578019570859563e-6,
      1.50563273514931155834e-7};
  constexpr double g = 7.0;
  const double z = x - 1.0;
  double a = c[0];
  for (std::size_t k = 1; k < c.size(); ++k) a += c[k] / (z + static_cast<double>(k));
  const double t = z + g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

/// Euler beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).
inline double beta(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw DomainError("beta: both arguments must be positive");
  }
  return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

struct Constants {
  double beta_3_4_1_2;  ///< B(3/4, 1/2)
  double lambda_star;   ///< B(3/4,1/2)^2 / (2 pi^2): lower end of the odd 2pi branch
  double h_star;        ///< sqrt(2 / lambda_star): cell height threshold
};

/// Computed once on first use; thread-safe static initialisation.
inline const Constants& constants() {
  static const Constants k = [] {
    Constants c{};
    c.beta_3_4_1_2 = beta(0.75, 0.5);
    c.lambda_star = c.beta_3_4_1_2 * c.beta_3_4_1_2 / (2.0 * std::numbers::pi * std::numbers::pi);
    c.h_star = std::sqrt(2.0 / c.lambda_star);
    return c;
  }();
  return k;
}

}  // namespace muskat
