#include "dpdsel/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "dpdsel/error.hpp"

namespace dpdsel {

void WeightScheme::validate() const {
  if (kind == WeightKind::uniform) return;
  if (!(a > 2.0) || !std::isfinite(a)) throw ValidationError("weights.a must be > 2, got " + std::to_string(a));
  if (!(q > 0.0) || !std::isfinite(q))
    throw ValidationError("weights.q must be > 0 for the scad_q scheme, got " + std::to_string(q));
  if (!(lambda_ref > 0.0) || !std::isfinite(lambda_ref))
    throw ValidationError("weights.lambda_ref must be > 0, got " + std::to_string(lambda_ref));
}

double scad_derivative(double beta_abs, double lambda, double a) {
  if (beta_abs <= lambda) return 1.0;
  if (beta_abs <= a * lambda) return (a * lambda - beta_abs) / ((a - 1.0) * lambda);
  return 0.0;
}

WeightVector build_weights(const Eigen::VectorXd& initial_beta, const WeightScheme& scheme) {
  scheme.validate();
  WeightVector out;
  out.scheme = scheme;
  if (scheme.kind == WeightKind::uniform) {
    out.w = Eigen::VectorXd::Ones(initial_beta.size());
    return out;
  }
  out.w.resize(initial_beta.size());
  for (Eigen::Index j = 0; j < initial_beta.size(); ++j) {
    if (!std::isfinite(initial_beta[j])) throw ValidationError("initial estimate has a non-finite entry at " + std::to_string(j));
    out.w[j] = scheme.q + scad_derivative(std::abs(initial_beta[j]), scheme.lambda_ref, scheme.a);
  }
  out.initial_estimate_hash = hash_vector(initial_beta);
  return out;
}

WeightVector uniform_weights(Eigen::Index p) {
  return {Eigen::VectorXd::Ones(p), WeightScheme::uniform(), 0};
}

double default_q(Eigen::Index n, double zeta) {
  if (!(zeta > 1.5)) throw ValidationError("zeta must be > 3/2, got " + std::to_string(zeta));
  if (n < 1) throw ValidationError("default_q: n must be >= 1");
  return std::pow(static_cast<double>(n), -zeta);
}

double reference_lambda(Eigen::Index n, Eigen::Index p, Eigen::Index k) {
  if (n < 1 || p < 1 || k < 1) throw ValidationError("reference_lambda: n, P and k must be >= 1");
  // log(1) = 0 would collapse the scale; P = 1 falls back to log 2.
  const double log_p = std::log(std::max<double>(static_cast<double>(p), 2.0));
  return std::sqrt(static_cast<double>(k) * log_p / static_cast<double>(n));
}

Eigen::VectorXd prox_weighted_l1(const Eigen::VectorXd& v, double threshold, const Eigen::VectorXd& w) {
  if (v.size() != w.size()) throw ValidationError("prox_weighted_l1: dimension mismatch");
  if (!(threshold >= 0.0)) throw ValidationError("prox_weighted_l1: threshold must be >= 0");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v[j]) - threshold * w[j];
    out[j] = mag > 0.0 ? std::copysign(mag, v[j]) : 0.0;
  }
  return out;
}

double log_prior(const Eigen::VectorXd& beta_active, const Eigen::VectorXd& w_active, Eigen::Index n,
                 double lambda) {
  if (beta_active.size() != w_active.size()) throw ValidationError("log_prior: dimension mismatch");
  const auto nu = beta_active.size();
  if (nu == 0) return 0.0;
  const double n_lambda = static_cast<double>(n) * lambda;
  double sum_log_w = 0.0;
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < nu; ++j) {
    if (!(w_active[j] > 0.0))
      throw ValidationError("log_prior: weight " + std::to_string(j) + " is not positive; prior density degenerates");
    sum_log_w += std::log(w_active[j]);
    l1 += w_active[j] * std::abs(beta_active[j]);
  }
  return static_cast<double>(nu) * std::log(n_lambda / 2.0) + sum_log_w - n_lambda * l1;
}

std::uint64_t hash_vector(const Eigen::VectorXd& v) {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v[j], sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace dpdsel
