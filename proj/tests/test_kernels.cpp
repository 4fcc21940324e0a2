#include <doctest.h>

#include <omp.h>

#include <random>
#include <vector>

#include "dpdsel/kernels.hpp"
#include "oracles/oracles.hpp"

using namespace dpdsel;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct ThreadCount {
  int saved;
  explicit ThreadCount(int t) : saved(omp_get_max_threads()) { omp_set_num_threads(t); }
  ~ThreadCount() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("openmp kernels match the serial reference and ignore the thread count") {
  // n spans several reduction blocks so the blocked sums are exercised
  const auto pr = oracle::random_problem(5, 9000, 37, 6);
  VectorXd beta = pr.beta;
  beta[10] = 0.25;
  const DpdLoss loss({0.3, 1.4});
  std::vector<Index> cols{0, 3, 10, 36};
  VectorXd c = VectorXd::LinSpaced(pr.X.rows(), -1, 2);

  VectorXd r_s, psi_s, g_s;
  kernels::serial::residuals(pr.X, pr.y, beta, r_s);
  const double l_s = kernels::serial::loss_and_psi(loss, r_s, psi_s);
  const double ls_s = kernels::serial::loss_sum(loss, r_s);
  kernels::serial::correlate(pr.X, psi_s, g_s);
  const MatrixXd G_s = kernels::serial::weighted_gram(pr.X, cols, c);

  auto close = [](const auto& a, const auto& b) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
  };
  VectorXd r1, psi1, g1;
  double l1 = 0, ls1 = 0;
  MatrixXd G1;
  for (int threads : {1, 2, 4}) {
    ThreadCount tc(threads);
    VectorXd r_o, psi_o, g_o;
    kernels::omp::residuals(pr.X, pr.y, beta, r_o);
    const double l_o = kernels::omp::loss_and_psi(loss, r_o, psi_o);
    const double ls_o = kernels::omp::loss_sum(loss, r_o);
    kernels::omp::correlate(pr.X, psi_o, g_o);
    const MatrixXd G_o = kernels::omp::weighted_gram(pr.X, cols, c);
    CHECK(close(r_o, r_s));
    CHECK(close(psi_o, psi_s));
    CHECK(l_o == doctest::Approx(l_s).epsilon(1e-12));
    CHECK(ls_o == doctest::Approx(ls_s).epsilon(1e-12));
    CHECK(close(g_o, g_s));
    CHECK(close(G_o, G_s));
    CHECK(G_o == G_o.transpose());
    if (threads == 1) {
      r1 = r_o, psi1 = psi_o, g1 = g_o, G1 = G_o, l1 = l_o, ls1 = ls_o;
    } else {
      CHECK(r_o == r1);
      CHECK(psi_o == psi1);
      CHECK(g_o == g1);
      CHECK(G_o == G1);
      CHECK(l_o == l1);
      CHECK(ls_o == ls1);
    }
  }
}

TEST_CASE("kernels compute what they claim") {
  const auto pr = oracle::random_problem(6, 50, 7, 3);
  const DpdLoss loss({0.5, 1.0});
  for (Backend b : {Backend::serial, Backend::openmp}) {
    VectorXd r, psi, g;
    kernels::residuals(b, pr.X, pr.y, pr.beta, r);
    CHECK((r - (pr.y - pr.X * pr.beta)).cwiseAbs().maxCoeff() < 1e-12);
    const double total = kernels::loss_and_psi(b, loss, r, psi);
    double expect = 0.0;
    for (Index i = 0; i < r.size(); ++i) expect += loss.rho(r[i]) - loss.rho_at_zero();
    CHECK(total == doctest::Approx(expect).epsilon(1e-12));
    kernels::correlate(b, pr.X, psi, g);
    CHECK((g - pr.X.transpose() * psi).cwiseAbs().maxCoeff() < 1e-12);
    std::vector<Index> cols{1, 4};
    VectorXd c = VectorXd::Constant(50, 2.0);
    const MatrixXd G = kernels::weighted_gram(b, pr.X, cols, c);
    MatrixXd Xs(50, 2);
    Xs << pr.X.col(1), pr.X.col(4);
    CHECK((G - 2.0 * Xs.transpose() * Xs).cwiseAbs().maxCoeff() < 1e-10);
  }
}
