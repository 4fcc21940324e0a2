#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpdsel/criteria.hpp"
#include "dpdsel/rng.hpp"
#include "dpdsel/selection.hpp"

namespace dpdsel {

enum class Sigma2Mode { true_value, estimated };

std::string_view to_string(Sigma2Mode m);

struct SimScenario {
  Index n = 500;
  Index p = 200;
  Index s = 5;
  /// Empty means s leading ones followed by zeros.
  Eigen::VectorXd beta_star;
  double sigma2 = 1.0;
  std::vector<double> contamination_rates{0.0};
  double outlier_multiplier = 10.0;
  std::vector<double> alphas{0.1};
  std::vector<CriterionKind> criteria{CriterionKind::dbbc, CriterionKind::edbbc, CriterionKind::gedbbc_practical};
  /// Add unif-BIC / unif-EBIC (uniform weights, alpha = 0).
  bool uniform_baselines = true;
  int trials = 100;
  std::uint64_t seed = 1;
  Sigma2Mode sigma2_mode = Sigma2Mode::true_value;
  Index grid_length = 50;
  SelectionConfig selection;
  bool mixed_as_under = true;

  void validate() const;
  Eigen::VectorXd resolved_beta_star() const;
  std::vector<Index> truth() const;
};

struct SimInstance {
  Dataset data;
  std::vector<Index> truth;
};

/// Design fixed for the whole scenario, drawn from the scenario seed.
Eigen::MatrixXd design_matrix(const SimScenario& scenario);

/// y = X beta* + eps with fresh noise for `trial`, centered.
SimInstance generate_instance(const SimScenario& scenario, const Eigen::MatrixXd& x, std::uint64_t trial);
SimInstance generate_instance(const SimScenario& scenario, std::uint64_t trial);

struct Contamination {
  Eigen::VectorXd y;
  std::vector<Index> mask;  ///< replaced positions, ascending
};

/// Replace each y_i by multiplier * y_i with probability r.
Contamination contaminate(const Eigen::VectorXd& y, double r, double multiplier, Rng& rng);

/// sigma2 from a uniform-weight least-squares LASSO: RSS / (n - nu), nu the
/// number of nonzero coefficients. With `scaled` the level is lambda0 * sigma
/// and the estimate is iterated to a fixed point starting from the sample
/// variance of y; otherwise lambda0 is used as is.
double estimate_sigma2(const Dataset& data, double lambda0, const SolverConfig& solver, bool scaled = true);

struct RateRow {
  std::string label;  ///< e.g. "E-DBBC (0.1)" or "unif-EBIC"
  CriterionKind kind = CriterionKind::dbbc;
  double alpha = 0.0;
  double r = 0.0;
  bool uniform = false;
  int um = 0, tm = 0, om = 0;
  int nc = 0;      ///< non-comparable picks (miss and spurious); inside um when folded
  int failed = 0;  ///< selection failures, excluded from the percentages

  int scored() const noexcept { return um + tm + om; }
  double um_pct() const noexcept;
  double tm_pct() const noexcept;
  double om_pct() const noexcept;
};

struct RateTable {
  Index n = 0;
  Index p = 0;
  int trials_requested = 0;
  int trials_completed = 0;
  bool complete = false;
  std::vector<RateRow> rows;
  /// Largest kkt_residual / n over converged path points.
  double worst_kkt_over_n = 0.0;
  /// Path points that did not converge.
  long nonconverged_points = 0;
  long path_points = 0;
  std::vector<std::string> failure_messages;

  const RateRow& find(const std::string& label, double r) const;
};

/// Round a percentage to one decimal for reporting.
double round_pct(double v);

struct RunControl {
  int workers = 1;
  const std::atomic<bool>* stop = nullptr;  ///< trials not yet started are skipped once set
  std::function<void(int done, int total)> progress;
};

/// Trials run concurrently; per-trial results are reduced in trial order, so
/// the table does not depend on the worker count.
RateTable run_scenario(const SimScenario& scenario, const RunControl& control = {});

}  // namespace dpdsel
