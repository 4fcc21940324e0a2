#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "dpdsel/kernels.hpp"
#include "dpdsel/penalty.hpp"
#include "dpdsel/rng.hpp"
#include "dpdsel/solver.hpp"

using namespace dpdsel;

namespace {

double time_ms(int reps, const std::function<void()>& f) {
  f();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial, double omp) {
  std::printf("%-28s %10.3f %10.3f %8.2fx\n", name, serial, omp, serial / omp);
}

}  // namespace

int main(int argc, char** argv) {
  const Index n = argc > 1 ? std::atol(argv[1]) : 2000;
  const Index p = argc > 2 ? std::atol(argv[2]) : 500;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 20;

  Rng rng = substream(7, {0});
  Dataset d{standard_normal(rng, n, p), Eigen::VectorXd()};
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta.head(std::min<Index>(5, p)).setOnes();
  d.y = d.X * beta + standard_normal(rng, n, 1).col(0);
  const DpdLoss loss(LossSpec{0.1, 1.0});
  std::vector<Index> cols;
  for (Index j = 0; j < std::min<Index>(p, 40); ++j) cols.push_back(j);

  std::printf("n=%ld p=%ld threads=%d reps=%d\n", static_cast<long>(n), static_cast<long>(p), omp_get_max_threads(), reps);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

  Eigen::VectorXd r(n), psi(n), g(p);
  auto bench = [&](const char* name, auto&& body) {
    row(name, time_ms(reps, [&] { body(Backend::serial); }), time_ms(reps, [&] { body(Backend::openmp); }));
  };
  bench("residuals", [&](Backend b) { kernels::residuals(b, d.X, d.y, beta, r); });
  bench("loss_and_psi", [&](Backend b) { kernels::loss_and_psi(b, loss, r, psi); });
  bench("correlate", [&](Backend b) { kernels::correlate(b, d.X, psi, g); });
  Eigen::VectorXd c = Eigen::VectorXd::Ones(n);
  bench("weighted_gram (40 cols)", [&](Backend b) { kernels::weighted_gram(b, d.X, cols, c); });

  const WeightVector w = uniform_weights(p);
  const double lambda = 0.1;
  bench("fit_one", [&](Backend b) {
    SolverConfig cfg;
    cfg.backend = b;
    fit_one(d, LossSpec{0.1, 1.0}, w, lambda, Eigen::VectorXd::Zero(p), cfg);
  });
  return 0;
}
