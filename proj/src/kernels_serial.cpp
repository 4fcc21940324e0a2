#include <algorithm>

#include "dpdsel/kernels.hpp"

namespace dpdsel::kernels::serial {

void residuals(const MatrixXd& X, const VectorXd& y, const VectorXd& beta, VectorXd& r) {
  const Index n = X.rows();
  r.resize(n);
  for (Index i = 0; i < n; ++i) {
    double fit = 0.0;
    for (Index j = 0; j < X.cols(); ++j) {
      if (beta[j] != 0.0) fit += X(i, j) * beta[j];
    }
    r[i] = y[i] - fit;
  }
}

double loss_and_psi(const DpdLoss& loss, const VectorXd& r, VectorXd& psi) {
  const Index n = r.size();
  psi.resize(n);
  double total = 0.0;
  for (Index start = 0; start < n; start += kReduceBlock) {
    const Index stop = std::min(n, start + kReduceBlock);
    double block = 0.0;
    for (Index i = start; i < stop; ++i) {
      block += loss.rho_shifted(r[i]);
      psi[i] = loss.psi(r[i]);
    }
    total += block;
  }
  return total;
}

double loss_sum(const DpdLoss& loss, const VectorXd& r) {
  const Index n = r.size();
  double total = 0.0;
  for (Index start = 0; start < n; start += kReduceBlock) {
    const Index stop = std::min(n, start + kReduceBlock);
    double block = 0.0;
    for (Index i = start; i < stop; ++i) block += loss.rho_shifted(r[i]);
    total += block;
  }
  return total;
}

void correlate(const MatrixXd& X, const VectorXd& v, VectorXd& out) {
  out.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    double acc = 0.0;
    for (Index i = 0; i < X.rows(); ++i) acc += X(i, j) * v[i];
    out[j] = acc;
  }
}

MatrixXd weighted_gram(const MatrixXd& X, std::span<const Index> cols, const VectorXd& c) {
  const auto k = static_cast<Index>(cols.size());
  MatrixXd out = MatrixXd::Zero(k, k);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index a = 0; a < k; ++a) {
      const double xa = c[i] * X(i, cols[a]);
      for (Index b = 0; b < k; ++b) out(a, b) += xa * X(i, cols[b]);
    }
  }
  return out;
}

}  // namespace dpdsel::kernels::serial
