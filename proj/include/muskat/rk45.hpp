#pragma once

// Dormand-Prince 5(4) embedded pair with PI step-size control and a
// sign-change event on a scalar function of the state.
//
// Values between accepted steps are produced by restarting the RK formula
// from the enclosing accepted node with the shortened step, so interpolated
// values carry the same local error as the accepted steps themselves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "muskat/errors.hpp"
#include "muskat/roots.hpp"

namespace muskat::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
  double tol = 1e-10;           ///< mixed absolute/relative local error per step
  double initial_step = 1e-2;
  double max_step = 0.1;
  double event_tol = 1e-13;     ///< bracket width when locating an event
  long max_steps = 1'000'000;
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
  Vec<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

}  // namespace detail

template <std::size_t N>
struct StepResult {
  Vec<N> y;      ///< fifth-order solution
  Vec<N> error;  ///< difference to the embedded fourth-order solution
  Vec<N> k_end;  ///< derivative at the new point (first stage of the next step)
};

/// One Dormand-Prince step of size h from (x, y) with k1 = rhs(x, y).
template <std::size_t N, class Rhs>
StepResult<N> dopri_step(const Rhs& rhs, double x, const Vec<N>& y, const Vec<N>& k1, double h) {
  using detail::axpy;
  const Vec<N> k2 = rhs(x + h / 5.0, axpy<N>(y, h, {{1.0 / 5.0, &k1}}));
  const Vec<N> k3 = rhs(x + 3.0 * h / 10.0, axpy<N>(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
  const Vec<N> k4 = rhs(x + 4.0 * h / 5.0,
                        axpy<N>(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
  const Vec<N> k5 = rhs(x + 8.0 * h / 9.0,
                        axpy<N>(y, h, {{19372.0 / 6561.0, &k1}, {-25360.0 / 2187.0, &k2},
                                       {64448.0 / 6561.0, &k3}, {-212.0 / 729.0, &k4}}));
  const Vec<N> k6 = rhs(x + h, axpy<N>(y, h, {{9017.0 / 3168.0, &k1}, {-355.0 / 33.0, &k2},
                                              {46732.0 / 5247.0, &k3}, {49.0 / 176.0, &k4},
                                              {-5103.0 / 18656.0, &k5}}));
  StepResult<N> r;
  r.y = axpy<N>(y, h, {{35.0 / 384.0, &k1}, {500.0 / 1113.0, &k3}, {125.0 / 192.0, &k4},
                       {-2187.0 / 6784.0, &k5}, {11.0 / 84.0, &k6}});
  r.k_end = rhs(x + h, r.y);
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  for (std::size_t i = 0; i < N; ++i) {
    r.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k_end[i]);
  }
  return r;
}

/// Accepted nodes of an integration. `at` evaluates between nodes.
template <std::size_t N>
struct Trajectory {
  std::vector<double> x;
  std::vector<Vec<N>> y;
  std::vector<Vec<N>> dy;  ///< rhs at each node

  double front() const { return x.front(); }
  double back() const { return x.back(); }

  template <class Rhs>
  Vec<N> at(const Rhs& rhs, double xq) const {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double h = xq - x[k];
    if (h == 0.0) return y[k];
    return dopri_step<N>(rhs, x[k], y[k], dy[k], h).y;
  }
};

template <std::size_t N>
struct IntegrationResult {
  Trajectory<N> path;
  std::optional<double> event_x;  ///< location of the first + to - crossing, if requested and found
};

inline double error_norm_component(double e, double y0, double y1, double tol) {
  return std::abs(e) / (tol + tol * std::max(std::abs(y0), std::abs(y1)));
}

/// Integrate y' = rhs(x, y) from (x0, y0) up to x_end. If `event` is given,
/// integration stops at the first point where event(y) changes sign from
/// positive to non-positive; that point is located to opt.event_tol and
/// appended as the final node.
template <std::size_t N, class Rhs, class Event>
IntegrationResult<N> integrate(const Rhs& rhs, double x0, const Vec<N>& y0, double x_end,
                               const Options& opt, const Event* event) {
  IntegrationResult<N> out;
  auto& path = out.path;
  path.x.push_back(x0);
  path.y.push_back(y0);
  path.dy.push_back(rhs(x0, y0));

  double x = x0;
  double h = std::min(opt.initial_step, x_end - x0);
  double err_prev = 1e-4;
  bool rejected = false;
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
  constexpr double a_exp = 0.7 / 5.0, b_exp = 0.4 / 5.0;

  for (long step = 0; step < opt.max_steps; ++step) {
    if (x >= x_end) return out;
    h = std::min({h, opt.max_step, x_end - x});
    if (h <= 1e-14 * std::max(1.0, std::abs(x))) {
      throw StepUnderflowError("step size underflow at x = " + std::to_string(x), x);
    }
    const Vec<N>& y = path.y.back();
    const Vec<N>& k1 = path.dy.back();
    const auto r = dopri_step<N>(rhs, x, y, k1, h);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) err = std::max(err, error_norm_component(r.error[i], y[i], r.y[i], opt.tol));
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      double fac = safety * std::pow(std::max(err, 1e-10), -a_exp) * std::pow(err_prev, b_exp);
      fac = std::clamp(fac, fac_min, rejected ? 1.0 : fac_max);
      err_prev = std::max(err, 1e-4);
      rejected = false;

      if (event != nullptr && (*event)(y) > 0.0 && (*event)(r.y) <= 0.0) {
        const double x_step = x;
        const Vec<N> y_step = y;
        const Vec<N> k_step = k1;
        auto g = [&](double hh) {
          if (hh == 0.0) return (*event)(y_step);
          return (*event)(dopri_step<N>(rhs, x_step, y_step, k_step, hh).y);
        };
        const double hev = roots::brent(g, 0.0, h, opt.event_tol);
        const Vec<N> yev = hev == h ? r.y : dopri_step<N>(rhs, x_step, y_step, k_step, hev).y;
        out.event_x = x_step + hev;
        path.x.push_back(x_step + hev);
        path.y.push_back(yev);
        path.dy.push_back(rhs(x_step + hev, yev));
        return out;
      }

      x += h;
      path.x.push_back(x);
      path.y.push_back(r.y);
      path.dy.push_back(r.k_end);
      h *= fac;
    } else {
      h *= std::max(fac_min, safety * std::pow(err, -1.0 / 5.0));
      rejected = true;
    }
  }
  throw StepUnderflowError("maximum number of steps exceeded at x = " + std::to_string(x), x);
}

template <std::size_t N, class Rhs>
IntegrationResult<N> integrate(const Rhs& rhs, double x0, const Vec<N>& y0, double x_end,
                               const Options& opt) {
  using NoEvent = double (*)(const Vec<N>&);
  return integrate<N, Rhs, NoEvent>(rhs, x0, y0, x_end, opt, nullptr);
}

}  // namespace muskat::ode
