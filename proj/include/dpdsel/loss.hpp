#pragma once

#include <cmath>

namespace dpdsel {

/// Divergence choice for the normal linear model.
///
/// `alpha > 0` selects the BHHJ (density power divergence) loss with tuning
/// parameter alpha; `alpha == 0` selects the Kullback-Leibler limit, i.e. the
/// scaled least-squares loss z^2 / (2 sigma2). The error variance `sigma2` is a
/// fixed nuisance value supplied by the caller and never estimated here.
struct LossSpec {
  double alpha = 0.0;
  double sigma2 = 1.0;

  bool is_kl() const noexcept { return alpha == 0.0; }
  /// Throws ValidationError unless alpha >= 0 and sigma2 > 0 (both finite).
  void validate() const;
};

/// Variance of rho'(eps) and mean of rho''(eps) for eps ~ N(0, sigma2).
struct MomentCoefficients {
  double omega_coeff = 0.0;
  double d_coeff = 0.0;
};

/// Loss with precomputed constants. Member functions are unchecked and meant
/// for inner loops; the free functions below validate their arguments.
class DpdLoss {
 public:
  explicit DpdLoss(const LossSpec& spec);

  const LossSpec& spec() const noexcept { return spec_; }

  double rho(double z) const noexcept {
    if (kl_) return half_inv_s2_ * z * z;
    return scale_ * (inv_sqrt_a1_ - ratio_ * std::exp(-half_a_s2_ * z * z));
  }

  /// rho(z) - rho(0). Avoids the large cancelling constant of the BHHJ form
  /// when alpha is small.
  double rho_shifted(double z) const noexcept {
    if (kl_) return half_inv_s2_ * z * z;
    return -scale_ * ratio_ * std::expm1(-half_a_s2_ * z * z);
  }

  double psi(double z) const noexcept {
    if (kl_) return inv_s2_ * z;
    return grad_scale_ * z * std::exp(-half_a_s2_ * z * z);
  }

  double psi_prime(double z) const noexcept {
    if (kl_) return inv_s2_;
    const double u = half_a_s2_ * z * z;
    return grad_scale_ * (1.0 - 2.0 * u) * std::exp(-u);
  }

  double rho_at_zero() const noexcept { return kl_ ? 0.0 : scale_ * (inv_sqrt_a1_ - ratio_); }

  /// Upper bound of rho'' over all z; a Lipschitz constant for psi.
  double curvature_bound() const noexcept { return kl_ ? inv_s2_ : grad_scale_; }

 private:
  LossSpec spec_;
  bool kl_;
  double inv_s2_;
  double half_inv_s2_;
  double half_a_s2_ = 0.0;    // alpha / (2 sigma2)
  double scale_ = 0.0;        // (2 pi)^(-alpha/2) sigma^(-alpha)
  double inv_sqrt_a1_ = 0.0;  // (alpha + 1)^(-1/2)
  double ratio_ = 0.0;        // (alpha + 1) / alpha
  double grad_scale_ = 0.0;   // (alpha + 1) (2 pi)^(-alpha/2) sigma^(-alpha-2)
};

double rho(const LossSpec& spec, double z);
double rho_prime(const LossSpec& spec, double z);
double rho_second(const LossSpec& spec, double z);

/// Closed-form moments for alpha > 0. The KL limit (both coefficients equal
/// 1 / sigma2) is rejected; use kl_moment_coefficients for it.
MomentCoefficients moment_coefficients(const LossSpec& spec);
MomentCoefficients kl_moment_coefficients(double sigma2);

/// sup_z rho(z) - inf_z rho(z) for alpha > 0.
double rho_range(const LossSpec& spec);

}  // namespace dpdsel
