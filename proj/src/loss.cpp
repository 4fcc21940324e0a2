#include "dpdsel/loss.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dpdsel/error.hpp"

namespace dpdsel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) throw ValidationError(std::string(what) + ": residual must be finite");
}

}  // namespace

void LossSpec::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw ValidationError("alpha must be finite and >= 0, got " + std::to_string(alpha));
  if (!std::isfinite(sigma2) || sigma2 <= 0.0)
    throw ValidationError("sigma2 must be finite and > 0, got " + std::to_string(sigma2));
}

DpdLoss::DpdLoss(const LossSpec& spec) : spec_(spec), kl_(spec.is_kl()) {
  spec.validate();
  inv_s2_ = 1.0 / spec.sigma2;
  half_inv_s2_ = 0.5 * inv_s2_;
  if (kl_) return;
  const double a = spec.alpha;
  const double sigma = std::sqrt(spec.sigma2);
  half_a_s2_ = 0.5 * a * inv_s2_;
  scale_ = std::pow(kTwoPi, -0.5 * a) * std::pow(sigma, -a);
  inv_sqrt_a1_ = 1.0 / std::sqrt(a + 1.0);
  ratio_ = (a + 1.0) / a;
  grad_scale_ = (a + 1.0) * scale_ * inv_s2_;
}

double rho(const LossSpec& spec, double z) {
  require_finite(z, "rho");
  return DpdLoss(spec).rho(z);
}

double rho_prime(const LossSpec& spec, double z) {
  require_finite(z, "rho_prime");
  return DpdLoss(spec).psi(z);
}

double rho_second(const LossSpec& spec, double z) {
  require_finite(z, "rho_second");
  return DpdLoss(spec).psi_prime(z);
}

MomentCoefficients moment_coefficients(const LossSpec& spec) {
  spec.validate();
  if (spec.is_kl())
    throw ValidationError("moment_coefficients: alpha must be > 0 (KL limit has both coefficients 1/sigma2)");
  const double a = spec.alpha;
  const double sigma = std::sqrt(spec.sigma2);
  MomentCoefficients m;
  m.omega_coeff = (a + 1.0) * (a + 1.0) * std::pow(2.0 * a + 1.0, -1.5) * std::pow(kTwoPi, -a) *
                  std::pow(sigma, -2.0 * a - 2.0);
  m.d_coeff = std::pow(a + 1.0, -0.5) * std::pow(kTwoPi, -0.5 * a) * std::pow(sigma, -a - 2.0);
  return m;
}

MomentCoefficients kl_moment_coefficients(double sigma2) {
  LossSpec{0.0, sigma2}.validate();
  return {1.0 / sigma2, 1.0 / sigma2};
}

double rho_range(const LossSpec& spec) {
  spec.validate();
  if (spec.is_kl()) throw ValidationError("rho_range: the KL loss is unbounded");
  const double a = spec.alpha;
  return (a + 1.0) / a * std::pow(kTwoPi, -0.5 * a) * std::pow(spec.sigma2, -0.5 * a);
}

}  // namespace dpdsel
