#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dpdsel {

enum class WeightKind { uniform, scad_q };

/// How per-coefficient penalty weights are generated.
///
/// scad_q: w_j = q + tau(|init_j|), tau being the SCAD derivative scaled to
/// [0, 1] and evaluated at the single reference level `lambda_ref`. The
/// offset q > 0 keeps the Laplace prior density strictly positive.
struct WeightScheme {
  WeightKind kind = WeightKind::uniform;
  double a = 3.7;
  double q = 0.0;
  double lambda_ref = 1.0;

  static WeightScheme uniform() { return {}; }
  static WeightScheme scad_q(double lambda_ref, double q, double a = 3.7) {
    return {WeightKind::scad_q, a, q, lambda_ref};
  }

  void validate() const;
};

struct WeightVector {
  Eigen::VectorXd w;
  WeightScheme scheme;
  /// Hash of the initial estimate the weights were derived from (0 for uniform).
  std::uint64_t initial_estimate_hash = 0;

  Eigen::Index size() const noexcept { return w.size(); }
};

/// SCAD first derivative divided by lambda: 1 on [0, lambda], linear down to 0
/// on (lambda, a*lambda], 0 beyond.
double scad_derivative(double beta_abs, double lambda, double a);

WeightVector build_weights(const Eigen::VectorXd& initial_beta, const WeightScheme& scheme);
WeightVector uniform_weights(Eigen::Index p);

/// q_n = n^(-zeta). Rejects zeta <= 3/2.
double default_q(Eigen::Index n, double zeta = 2.0);

/// sqrt(k log P / n). With k the expected support size this is the level at
/// which the adaptive weights are evaluated; with k = S it centres the default
/// lambda grid.
double reference_lambda(Eigen::Index n, Eigen::Index p, Eigen::Index k);

/// Elementwise soft threshold sign(v_j) max(0, |v_j| - threshold * w_j).
Eigen::VectorXd prox_weighted_l1(const Eigen::VectorXd& v, double threshold, const Eigen::VectorXd& w);

/// log of the Laplace prior restricted to the active coefficients:
/// nu log(n lambda / 2) + sum log w_j - n lambda sum w_j |beta_j|.
double log_prior(const Eigen::VectorXd& beta_active, const Eigen::VectorXd& w_active, Eigen::Index n,
                 double lambda);

std::uint64_t hash_vector(const Eigen::VectorXd& v);

}  // namespace dpdsel
