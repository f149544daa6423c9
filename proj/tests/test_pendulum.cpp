#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "muskat/branch.hpp"
#include "muskat/pendulum.hpp"
#include "oracles.hpp"

using namespace muskat;
constexpr double pi = std::numbers::pi;

namespace {

SolutionProfile even_at(double lam, std::size_t n = 512) { return translate_even(profile_at(lam, n), 1); }

/// max |theta'' + lambda sin theta| with theta'' from an eighth-order periodic
/// difference of the theta' samples.
double pendulum_residual(const PendulumTrajectory& t) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const std::size_t n = t.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t k = 1; k <= 4; ++k)
      d += c[k - 1] * (t.samples[(i + k) % n].theta_prime - t.samples[(i + n - k) % n].theta_prime);
    worst = std::max(worst, std::abs(d / t.spacing() + t.lambda * std::sin(t.samples[i].theta)));
  }
  return worst;
}

}  // namespace

TEST(ToPendulum, FlatProfile) {
  const auto t = to_pendulum(even_at(1.0, 64), 64);
  EXPECT_NEAR(t.period_L, 2 * pi, 1e-14);
  for (const auto& v : t.samples) {
    EXPECT_EQ(v.theta, 0.0);
    EXPECT_EQ(v.theta_prime, 0.0);
  }
}

TEST(ToPendulum, SolvesPendulumEquation) {
  for (double lam : {0.5, 0.7, 0.9}) {
    const auto t = to_pendulum(even_at(lam), 512);
    EXPECT_LT(pendulum_residual(t), 1e-5) << lam;
  }
}

TEST(ToPendulum, TrajectoryInvariants) {
  for (double lam : {0.4, 0.7, 0.9}) {
    const auto ev = even_at(lam);
    const auto t = to_pendulum(ev, 512);
    const double e0 = pendulum_energy(t.samples[0], lam);
    const double alpha = alpha_of_lambda(lam);
    EXPECT_NEAR(t.samples[0].theta, 0.0, 1e-10);
    EXPECT_NEAR(t.samples[0].theta_prime, -lam * max_amplitude(lam, alpha), 1e-10);
    double sup = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const auto& v = t.samples[j];
      EXPECT_LT(std::abs(v.theta), pi / 2);
      EXPECT_NEAR(pendulum_energy(v, lam), e0, 1e-8);
      if (j > 0) {
        EXPECT_NEAR(t.samples[t.size() - j].theta, -v.theta, 1e-9);
        EXPECT_NEAR(t.samples[t.size() - j].theta_prime, v.theta_prime, 1e-9);
      }
      sup = std::max(sup, std::abs(v.theta));
    }
    EXPECT_NEAR(sup, std::atan(alpha), 1e-8) << lam;
  }
}

TEST(ToPendulum, RequiresEvenProfile) {
  EXPECT_THROW(to_pendulum(profile_at(0.8, 128)), ParityError);
  auto ev = even_at(0.8, 128);
  ev.samples[5].f += 1e-4;
  EXPECT_THROW(to_pendulum(ev), ParityError);
}

TEST(ToPendulum, MatchesDirectIntegration) {
  for (double lam : {0.5, 0.9}) {
    const auto t = to_pendulum(even_at(lam), 256);
    const auto d = integrate_pendulum(lam, t.samples[0].theta_prime, 256);
    EXPECT_NEAR(d.period_L, t.period_L, 1e-8);
    for (std::size_t j = 0; j < 256; ++j) {
      EXPECT_NEAR(d.samples[j].theta, t.samples[j].theta, 1e-8);
      EXPECT_NEAR(d.samples[j].theta_prime, t.samples[j].theta_prime, 1e-8);
    }
  }
}

TEST(FromPendulum, FlatTrajectory) {
  const auto s = from_pendulum(integrate_pendulum(1.0, 0.0, 64), 64);
  EXPECT_NEAR(s.period, 2 * pi, 1e-14);
  for (const auto& v : s.samples) EXPECT_EQ(v.f, 0.0);
}

TEST(FromPendulum, RoundTrips) {
  for (double lam : {0.5, 0.7, 0.9}) {
    const auto ev = even_at(lam);
    const auto back = from_pendulum(to_pendulum(ev, 512), 512);
    EXPECT_NEAR(back.period, ev.period, 1e-8);
    for (std::size_t i = 0; i < 512; ++i) {
      EXPECT_NEAR(back.samples[i].f, ev.samples[i].f, 1e-6);
      EXPECT_NEAR(back.samples[i].g, ev.samples[i].g, 1e-6);
    }
    const auto tr = to_pendulum(ev, 512);
    const auto again = to_pendulum(from_pendulum(tr, 512), 512);
    EXPECT_NEAR(again.period_L, tr.period_L, 1e-8);
    for (std::size_t j = 0; j < 512; ++j) EXPECT_NEAR(again.samples[j].theta, tr.samples[j].theta, 1e-6);
    EXPECT_LT(residual(back).ode_residual_max, 1e-6);
  }
}

TEST(FromPendulum, RefusesTangentSingularity) {
  const double lam = 1.0;
  // theta' (0)^2 = 2 lambda (1 - cos theta_max) with theta_max = pi/2 - 1e-7
  const double w = -std::sqrt(2.0 * lam * (1.0 - std::cos(pi / 2 - 1e-7)));
  const auto t = integrate_pendulum(lam, w, 256);
  EXPECT_THROW(from_pendulum(t), SingularityError);
  EXPECT_THROW(from_pendulum(integrate_pendulum(lam, -0.5, 256), 2), DomainError);
}

TEST(Period, Examples) {
  EXPECT_NEAR(pendulum_period(1.0), 2 * pi, 1e-14);
  EXPECT_NEAR(pendulum_period(0.9), to_pendulum(even_at(0.9)).period_L, 1e-6);
}

TEST(Period, EllipticIntegralOracle) {
  for (double lam : {0.3, 0.4, 0.5, 0.7, 0.9}) {
    const double a = alpha_of_lambda(lam);
    EXPECT_NEAR(pendulum_period(lam), oracle::pendulum_period(lam, a), 1e-11) << lam;
  }
}

TEST(Period, DecreasingAndSupThetaIncreasingTowardCap) {
  const auto grid = branch_grid(constants().lambda_star + 1e-6, 40, GridPolicy::graded);
  double prev_l = std::numeric_limits<double>::infinity(), prev_sup = pi / 2;
  for (double lam : grid) {
    const double L = pendulum_period(lam);
    const double sup = std::atan(alpha_of_lambda(lam));
    EXPECT_LT(L, prev_l) << lam;
    EXPECT_LT(sup, prev_sup) << lam;
    prev_l = L;
    prev_sup = sup;
  }
  EXPECT_GT(std::atan(alpha_of_lambda(constants().lambda_star + 1e-6)), pi / 2 - 1e-5);
}

TEST(Period, InverseSolve) {
  for (double lam : {0.35, 0.6, 0.95, 1.0}) EXPECT_NEAR(lambda_of_pendulum_period(pendulum_period(lam)), lam, 1e-10);
  EXPECT_THROW(lambda_of_pendulum_period(6.0), OutOfRangeError);
}

TEST(IntegratePendulum, Errors) {
  EXPECT_THROW(integrate_pendulum(0.0, 0.1), DomainError);
  EXPECT_THROW(integrate_pendulum(1.0, 2.0), DomainError);
  EXPECT_THROW(integrate_pendulum(1.0, 0.1, 2), DomainError);
}
