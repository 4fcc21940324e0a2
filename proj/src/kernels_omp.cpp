#include <algorithm>
#include <vector>

#include "dpdsel/kernels.hpp"

namespace dpdsel::kernels::omp {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr Index kParallelWork = Index{1} << 15;
constexpr Index kRowBlock = 1024;
constexpr Index kColBlock = 32;

Index block_count(Index total, Index block) { return (total + block - 1) / block; }

}  // namespace

void residuals(const MatrixXd& X, const VectorXd& y, const VectorXd& beta, VectorXd& r) {
  const Index n = X.rows();
  r.resize(n);
  std::vector<Index> active;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) active.push_back(j);
  }
  const auto nnz = static_cast<Index>(active.size());
  const Index blocks = block_count(n, kRowBlock);
#pragma omp parallel for schedule(static) if (n * nnz > kParallelWork)
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kRowBlock;
    const Index len = std::min(kRowBlock, n - start);
    auto seg = r.segment(start, len);
    seg = y.segment(start, len);
    for (Index j : active) seg.noalias() -= beta[j] * X.col(j).segment(start, len);
  }
}

double loss_and_psi(const DpdLoss& loss, const VectorXd& r, VectorXd& psi) {
  const Index n = r.size();
  psi.resize(n);
  const Index blocks = block_count(n, kReduceBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) if (n > kParallelWork)
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kReduceBlock;
    const Index stop = std::min(n, start + kReduceBlock);
    double acc = 0.0;
    for (Index i = start; i < stop; ++i) {
      acc += loss.rho_shifted(r[i]);
      psi[i] = loss.psi(r[i]);
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double loss_sum(const DpdLoss& loss, const VectorXd& r) {
  const Index n = r.size();
  const Index blocks = block_count(n, kReduceBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) if (n > kParallelWork)
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kReduceBlock;
    const Index stop = std::min(n, start + kReduceBlock);
    double acc = 0.0;
    for (Index i = start; i < stop; ++i) acc += loss.rho_shifted(r[i]);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void correlate(const MatrixXd& X, const VectorXd& v, VectorXd& out) {
  const Index p = X.cols();
  out.resize(p);
  const Index blocks = block_count(p, kColBlock);
#pragma omp parallel for schedule(static) if (X.rows() * p > kParallelWork)
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kColBlock;
    const Index len = std::min(kColBlock, p - start);
    out.segment(start, len).noalias() = X.middleCols(start, len).transpose() * v;
  }
}

MatrixXd weighted_gram(const MatrixXd& X, std::span<const Index> cols, const VectorXd& c) {
  const auto k = static_cast<Index>(cols.size());
  const Index n = X.rows();
  MatrixXd gathered(n, k);
  for (Index a = 0; a < k; ++a) gathered.col(a) = X.col(cols[a]);
  MatrixXd scaled = gathered.array().colwise() * c.array();
  MatrixXd out(k, k);
#pragma omp parallel for schedule(static) if (n * k * k > kParallelWork)
  for (Index b = 0; b < k; ++b) out.col(b).noalias() = gathered.transpose() * scaled.col(b);
  // Column-wise products are not bitwise symmetric.
  return 0.5 * (out + out.transpose());
}

}  // namespace dpdsel::kernels::omp
