#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpdsel/criteria.hpp"
#include "dpdsel/penalty.hpp"
#include "dpdsel/solver.hpp"

namespace dpdsel {

enum class InitialEstimator { bhhj_lasso, ridge, least_squares };

std::string_view to_string(InitialEstimator e);
std::optional<InitialEstimator> parse_initial_estimator(std::string_view name);

struct SelectionConfig {
  SolverConfig solver;
  CriteriaConfig criteria;
  /// Largest admissible model size S; 0 resolves to min(n/2, 3 expected_s, 50).
  Index max_model_size = 0;
  Index expected_s = 5;
  /// Level, in coefficient units, at which the SCAD derivative is evaluated;
  /// 0 resolves to sigma sqrt(lambda_ref_k log P / n).
  double lambda_ref = 0.0;
  double lambda_ref_k = 2.0;
  /// Weight offset q_n; 0 resolves to n^(-zeta).
  double q = 0.0;
  double scad_a = 3.7;
  InitialEstimator initial = InitialEstimator::bhhj_lasso;
  double ridge_lambda = 1.0;

  void validate() const;
  Index resolved_max_model_size(Index n) const;
};

/// Resolve the defaults of `config` into a concrete weight scheme for an n x p
/// problem with error variance sigma2.
WeightScheme make_scheme(WeightKind kind, Index n, Index p, const SelectionConfig& config, double sigma2 = 1.0);

/// Criterion record for one path point.
struct PathPointEval {
  double lambda = 0.0;
  Index nu = 0;
  bool converged = false;
  FitStatus status = FitStatus::converged;
  double kkt_residual = 0.0;
  bool excluded = false;     ///< nu > S
  bool eval_failed = false;  ///< log |T_n| undefined
  std::string failure;
  std::optional<ModelEval> eval;

  bool valid() const noexcept { return converged && !excluded && !eval_failed && eval.has_value(); }
};

struct SelectionResult {
  CriterionKind kind = CriterionKind::dbbc;
  bool success = false;
  double chosen_lambda = 0.0;
  Index chosen_index = -1;
  std::vector<Index> chosen_active_set;
  Eigen::VectorXd chosen_beta;
  std::vector<PathPointEval> points;
};

/// One path shared by several criteria.
struct SelectionRun {
  Eigen::VectorXd initial_estimate;
  WeightVector weights;
  PathFit path;
  Index max_model_size = 0;
  std::vector<SelectionResult> results;  ///< one per requested kind, same order
};

/// Penalty level for the initial BHHJ-LASSO: lambda_ref times E[rho''(eps)],
/// so its first-order shrinkage of a coefficient is lambda_ref for every alpha.
double initial_lambda(const LossSpec& spec, double lambda_ref);

/// Initial estimate feeding the adaptive weights.
Eigen::VectorXd initial_estimate(const Dataset& data, const LossSpec& spec, double lambda_ref,
                                 const SelectionConfig& config);

/// Weights, warm-started path over `grid`, criterion per path point, argmin.
/// Ties go to the larger lambda. Points that did not converge, exceed S, or
/// whose criterion is undefined are recorded but never chosen.
SelectionRun select_many(const Dataset& data, const LossSpec& spec, const WeightScheme& scheme,
                         std::span<const double> grid, const SelectionConfig& config,
                         std::span<const CriterionKind> kinds);

SelectionResult select(const Dataset& data, const LossSpec& spec, const WeightScheme& scheme,
                       std::span<const double> grid, const SelectionConfig& config, CriterionKind kind);

enum class ModelClass { UM, TM, OM, NC };

std::string_view to_string(ModelClass c);

/// TM: equal to truth. OM: strict superset. UM: misses a true variable and adds
/// nothing. NC: misses a true variable and adds a spurious one.
ModelClass classify(std::span<const Index> chosen, std::span<const Index> truth);

/// Fold NC into UM (a missed true variable is the graver error) when requested.
inline ModelClass table_class(ModelClass c, bool mixed_as_under = true) {
  return (c == ModelClass::NC && mixed_as_under) ? ModelClass::UM : c;
}

/// Fraction of the P candidates on which both selections agree.
double concordance_rate(std::span<const Index> a, std::span<const Index> b, Index p);

}  // namespace dpdsel
