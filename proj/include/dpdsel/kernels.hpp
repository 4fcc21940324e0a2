#pragma once

#include <span>

#include <Eigen/Dense>

#include "dpdsel/loss.hpp"

namespace dpdsel {

/// Which implementation of the data-parallel kernels to run. `serial` is the
/// scalar reference kept for testing; `openmp` is the production path.
enum class Backend { serial, openmp };

namespace kernels {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Reductions are accumulated in fixed-size blocks and the block sums added in
/// order, so results do not depend on the thread count.
inline constexpr Index kReduceBlock = 4096;

namespace serial {
void residuals(const MatrixXd& X, const VectorXd& y, const VectorXd& beta, VectorXd& r);
double loss_and_psi(const DpdLoss& loss, const VectorXd& r, VectorXd& psi);
double loss_sum(const DpdLoss& loss, const VectorXd& r);
void correlate(const MatrixXd& X, const VectorXd& v, VectorXd& out);
MatrixXd weighted_gram(const MatrixXd& X, std::span<const Index> cols, const VectorXd& c);
}  // namespace serial

namespace omp {
void residuals(const MatrixXd& X, const VectorXd& y, const VectorXd& beta, VectorXd& r);
double loss_and_psi(const DpdLoss& loss, const VectorXd& r, VectorXd& psi);
double loss_sum(const DpdLoss& loss, const VectorXd& r);
void correlate(const MatrixXd& X, const VectorXd& v, VectorXd& out);
MatrixXd weighted_gram(const MatrixXd& X, std::span<const Index> cols, const VectorXd& c);
}  // namespace omp

/// r = y - X beta (columns with beta_j == 0 are skipped).
inline void residuals(Backend b, const MatrixXd& X, const VectorXd& y, const VectorXd& beta, VectorXd& r) {
  b == Backend::serial ? serial::residuals(X, y, beta, r) : omp::residuals(X, y, beta, r);
}

/// psi_i = rho'(r_i); returns sum_i (rho(r_i) - rho(0)).
inline double loss_and_psi(Backend b, const DpdLoss& loss, const VectorXd& r, VectorXd& psi) {
  return b == Backend::serial ? serial::loss_and_psi(loss, r, psi) : omp::loss_and_psi(loss, r, psi);
}

/// sum_i (rho(r_i) - rho(0)).
inline double loss_sum(Backend b, const DpdLoss& loss, const VectorXd& r) {
  return b == Backend::serial ? serial::loss_sum(loss, r) : omp::loss_sum(loss, r);
}

/// out = X^T v.
inline void correlate(Backend b, const MatrixXd& X, const VectorXd& v, VectorXd& out) {
  b == Backend::serial ? serial::correlate(X, v, out) : omp::correlate(X, v, out);
}

/// sum_i c_i x_i[cols] x_i[cols]^T.
inline MatrixXd weighted_gram(Backend b, const MatrixXd& X, std::span<const Index> cols, const VectorXd& c) {
  return b == Backend::serial ? serial::weighted_gram(X, cols, c) : omp::weighted_gram(X, cols, c);
}

}  // namespace kernels
}  // namespace dpdsel
