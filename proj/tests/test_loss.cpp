#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dpdsel/error.hpp"
#include "dpdsel/loss.hpp"
#include "oracles/oracles.hpp"

using namespace dpdsel;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("rho at alpha=1, z=0 matches the divergence integral") {
  const LossSpec s{1.0, 1.0};
  const double frozen = std::pow(2 * kPi, -0.5) * (std::pow(2.0, -0.5) - 2.0);
  CHECK(frozen == Approx(-0.515790).epsilon(1e-6));
  CHECK(rho(s, 0.0) == Approx(frozen).epsilon(1e-14));
  CHECK(oracle::bhhj_rho_quadrature(1.0, 1.0, 0.0) == Approx(frozen).epsilon(1e-10));
}

TEST_CASE("rho agrees with quadrature over a spread of alpha, sigma2, z") {
  for (double a : {0.1, 0.5, 1.0, 2.0})
    for (double s2 : {0.5, 1.0, 3.0})
      for (double z : {-4.0, -0.3, 0.0, 1.2, 7.0}) {
        const LossSpec s{a, s2};
        CHECK(rho(s, z) == Approx(oracle::bhhj_rho_quadrature(a, s2, z)).epsilon(1e-9));
      }
}

TEST_CASE("KL branch is z^2 / (2 sigma2)") {
  CHECK(rho({0.0, 1.0}, 0.0) == 0.0);
  CHECK(rho({0.0, 2.0}, 3.0) == Approx(9.0 / 4.0));
  CHECK(rho_prime({0.0, 1.0}, 3.0) == 3.0);
  CHECK(rho_second({0.0, 1.0}, -17.0) == 1.0);
  CHECK(rho_second({0.0, 4.0}, 2.0) == 0.25);
}

TEST_CASE("rho tail limit at alpha=0.5") {
  const LossSpec s{0.5, 1.0};
  const double lim = std::pow(2 * kPi, -0.25) * std::pow(1.5, -0.5);
  CHECK(lim == Approx(0.515715).epsilon(1e-6));
  CHECK(rho(s, 50.0) == Approx(lim).epsilon(1e-14));
  CHECK(rho(s, -50.0) == Approx(lim).epsilon(1e-14));
}

TEST_CASE("rho_prime examples") {
  const LossSpec s{1.0, 1.0};
  const double frozen = 2.0 / std::sqrt(2 * kPi) * std::exp(-0.5);
  CHECK(frozen == Approx(0.483941).epsilon(1e-6));
  CHECK(rho_prime(s, 1.0) == Approx(frozen).epsilon(1e-14));
  CHECK(oracle::central_diff([&](double z) { return rho(s, z); }, 1.0, 1e-6) == Approx(frozen).epsilon(1e-8));
  for (double a : {0.0, 0.1, 1.0}) CHECK(rho_prime({a, 1.3}, 0.0) == 0.0);
}

TEST_CASE("rho_second examples") {
  const LossSpec s{1.0, 1.0};
  const double frozen = 2.0 / std::sqrt(2 * kPi);
  CHECK(frozen == Approx(0.797885).epsilon(1e-6));
  CHECK(rho_second(s, 0.0) == Approx(frozen).epsilon(1e-14));
  CHECK(oracle::second_diff([&](double z) { return rho(s, z); }, 0.0, 1e-4) == Approx(frozen).epsilon(1e-6));
  CHECK(std::abs(rho_second({0.5, 1.0}, std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("derivatives agree with finite differences at random points") {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> ua(1e-3, 1.0), us(0.25, 4.0), uz(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const LossSpec s{ua(g), us(g)};
    const double z = uz(g);
    const double h = 1e-6;
    const double d1 = rho_prime(s, z);
    const double d2 = rho_second(s, z);
    const double fd1 = oracle::central_diff([&](double t) { return rho(s, t); }, z, h);
    const double fd2 = oracle::central_diff([&](double t) { return rho_prime(s, t); }, z, h);
    CHECK(std::abs(d1 - fd1) <= 1e-6 * std::max(1.0, std::abs(d1)));
    CHECK(std::abs(d2 - fd2) <= 1e-6 * std::max(1.0, std::abs(d2)));
  }
}

TEST_CASE("rho_prime is odd and redescending beyond sigma / sqrt(alpha)") {
  const LossSpec s{0.4, 1.7};
  const double start = std::sqrt(s.sigma2 / s.alpha);
  double prev = std::abs(rho_prime(s, start));
  for (double z = start + 0.05; z < 30.0; z += 0.05) {
    CHECK(rho_prime(s, -z) == Approx(-rho_prime(s, z)));
    const double cur = std::abs(rho_prime(s, z));
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(rho_second(s, 2 * start) < 0.0);
}

TEST_CASE("range of the bounded loss") {
  for (double a : {0.1, 0.5, 1.0})
    for (double s2 : {0.5, 2.0}) {
      const LossSpec s{a, s2};
      const double expect = (a + 1) / a * std::pow(2 * kPi, -a / 2) * std::pow(s2, -a / 2);
      CHECK(rho_range(s) == Approx(expect).epsilon(1e-14));
      CHECK(rho(s, 1e3) - rho(s, 0.0) == Approx(expect).epsilon(1e-12));
    }
  CHECK_THROWS_AS(rho_range({0.0, 1.0}), ValidationError);
}

TEST_CASE("moment coefficients closed form") {
  const auto m = moment_coefficients({1.0, 1.0});
  CHECK(m.omega_coeff == Approx(4.0 * std::pow(3.0, -1.5) / (2 * kPi)).epsilon(1e-14));
  CHECK(m.omega_coeff == Approx(0.122510).epsilon(1e-5));
  CHECK(m.d_coeff == Approx(0.282095).epsilon(1e-5));
  const auto tiny = moment_coefficients({1e-9, 1.0});
  CHECK(tiny.omega_coeff == Approx(1.0).epsilon(1e-7));
  CHECK(tiny.d_coeff == Approx(1.0).epsilon(1e-7));
  const auto kl = kl_moment_coefficients(2.0);
  CHECK(kl.omega_coeff == 0.5);
  CHECK(kl.d_coeff == 0.5);
  CHECK_THROWS_AS(moment_coefficients({0.0, 1.0}), ValidationError);
}

TEST_CASE("moment coefficients against Monte Carlo") {
  // 10^6 draws here; the acceptance binary repeats this at 10^7 within 1%.
  std::mt19937_64 g(99);
  for (double a : {0.1, 0.5, 1.0})
    for (double s2 : {0.5, 2.0}) {
      const LossSpec s{a, s2};
      std::normal_distribution<double> N(0.0, std::sqrt(s2));
      const int draws = 1000000;
      double m1 = 0, m2 = 0, md = 0;
      for (int i = 0; i < draws; ++i) {
        const double e = N(g);
        const double p = rho_prime(s, e);
        m1 += p;
        m2 += p * p;
        md += rho_second(s, e);
      }
      m1 /= draws, m2 /= draws, md /= draws;
      const double var = m2 - m1 * m1;
      const auto mc = moment_coefficients(s);
      CHECK(std::abs(m1) < 4.0 * std::sqrt(var / draws));
      CHECK(var == Approx(mc.omega_coeff).epsilon(0.02));
      CHECK(md == Approx(mc.d_coeff).epsilon(0.02));
    }
}

TEST_CASE("invalid specs and residuals are rejected") {
  CHECK_THROWS_AS(LossSpec({-0.1, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS(LossSpec({0.1, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(rho({0.1, 1.0}, std::numeric_limits<double>::infinity()), ValidationError);
  CHECK_THROWS_AS(rho_prime({0.1, 1.0}, std::nan("")), ValidationError);
  CHECK_THROWS_AS(rho_second({0.0, 1.0}, std::nan("")), ValidationError);
}

TEST_CASE("DpdLoss shifted form equals rho minus rho(0)") {
  const DpdLoss L({0.01, 1.0});
  for (double z : {0.0, 1e-4, 0.5, 3.0, 40.0})
    CHECK(L.rho_shifted(z) == Approx(L.rho(z) - L.rho_at_zero()).epsilon(1e-9));
}
