#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpdsel/error.hpp"
#include "dpdsel/loss.hpp"
#include "dpdsel/penalty.hpp"
#include "dpdsel/solver.hpp"

namespace dpdsel {

enum class CriterionKind { dbbc, edbbc, gedbbc_exact, gedbbc_practical };

std::string_view to_string(CriterionKind kind);
/// Accepts DBBC, EDBBC / E-DBBC, GEDBBC / GE-DBBC (resolved by `exact_ge`),
/// GEDBBC_exact and GEDBBC_practical, case-insensitively.
std::optional<CriterionKind> parse_criterion(std::string_view name, bool exact_ge = false);

struct CriteriaConfig {
  double gamma = 0.5;  ///< model-prior exponent, strictly inside (0, 1)
  double zeta = 2.0;   ///< q_n = n^(-zeta), zeta > 3/2
  bool use_exact_gedbbc = false;

  void validate() const;
};

/// Labelled additive parts of a criterion value.
struct CriterionComponents {
  double main = 0.0;     ///< -2 M_n (plus n log(2 pi sigma2) in the KL case)
  double log_n = 0.0;
  double log_p = 0.0;
  double prior = 0.0;    ///< -2 log prior (exact) or -2 nu log lambda (practical)
  double log_2pi = 0.0;  ///< -nu log(2 pi), exact GE-DBBC only
  double log_det = 0.0;  ///< log |T_n|

  double sum() const noexcept { return main + log_n + log_p + prior + log_2pi + log_det; }
};

struct ModelEval {
  Index nu = 0;
  double m_n = 0.0;
  CriterionKind kind = CriterionKind::dbbc;
  double value = 0.0;
  CriterionComponents components;
};

/// Everything a criterion needs about one fitted model.
struct EvalInputs {
  Index n = 0;
  Index p = 0;
  Index nu = 0;
  double m_n = 0.0;
  /// n/2 log(2 pi sigma2) for the KL loss, 0 otherwise. Subtracting it from
  /// M_n gives the Gaussian log-likelihood, so DBBC / E-DBBC reduce to
  /// BIC / EBIC exactly.
  double normal_constant = 0.0;
  double log_prior = 0.0;
  bool prior_defined = true;  ///< false when an active weight is zero
  double log_det_t = 0.0;
  double lambda = 0.0;
};

/// Raised when log |T_n| is undefined (T_n singular or indefinite).
class EvaluationFailure : public NumericalError {
 public:
  explicit EvaluationFailure(const std::string& what) : NumericalError(what) {}
};

/// M_n = -sum_i rho(y_i - x_i' beta).
double quasi_likelihood(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& beta);
double normal_constant(const LossSpec& spec, Index n);

/// T_n = (1/n) sum_i rho''(r_i) x_i[active] x_i[active]'.
Eigen::MatrixXd t_matrix(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& beta,
                         std::span<const Index> active, Backend backend = Backend::openmp);
/// log |T| via Cholesky; throws EvaluationFailure unless T is positive definite.
double log_det_spd(const Eigen::MatrixXd& t);

ModelEval dbbc(const EvalInputs& in);
ModelEval edbbc(const EvalInputs& in, const CriteriaConfig& config);
ModelEval gedbbc_exact(const EvalInputs& in, const CriteriaConfig& config);
ModelEval gedbbc_practical(const EvalInputs& in, const CriteriaConfig& config);

/// Dispatch by kind. A model with nu == 0 is scored by its main term alone.
ModelEval evaluate(CriterionKind kind, const EvalInputs& in, const CriteriaConfig& config);

/// Assemble EvalInputs for `fit`. log |T_n| is only computed when `with_log_det`.
EvalInputs gather_inputs(const Dataset& data, const LossSpec& spec, const FitResult& fit, const WeightVector& w,
                         bool with_log_det, Backend backend = Backend::openmp);

bool needs_log_det(CriterionKind kind);

}  // namespace dpdsel
