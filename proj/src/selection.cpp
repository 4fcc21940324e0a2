#include "dpdsel/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "dpdsel/error.hpp"

namespace dpdsel {

std::string_view to_string(InitialEstimator e) {
  switch (e) {
    case InitialEstimator::bhhj_lasso: return "bhhj_lasso";
    case InitialEstimator::ridge: return "ridge";
    case InitialEstimator::least_squares: return "least_squares";
  }
  return "unknown";
}

std::optional<InitialEstimator> parse_initial_estimator(std::string_view name) {
  if (name == "bhhj_lasso") return InitialEstimator::bhhj_lasso;
  if (name == "ridge") return InitialEstimator::ridge;
  if (name == "least_squares") return InitialEstimator::least_squares;
  return std::nullopt;
}

void SelectionConfig::validate() const {
  solver.validate();
  criteria.validate();
  if (max_model_size < 0) throw ValidationError("selection.max_model_size must be >= 0");
  if (expected_s < 1) throw ValidationError("selection.expected_s must be >= 1");
  if (!(lambda_ref >= 0.0)) throw ValidationError("selection.lambda_ref must be >= 0");
  if (!(lambda_ref_k > 0.0)) throw ValidationError("selection.lambda_ref_k must be > 0");
  if (!(q >= 0.0)) throw ValidationError("selection.q must be >= 0");
  if (!(scad_a > 2.0)) throw ValidationError("selection.scad_a must be > 2");
  if (!(ridge_lambda > 0.0)) throw ValidationError("selection.ridge_lambda must be > 0");
}

Index SelectionConfig::resolved_max_model_size(Index n) const {
  if (max_model_size > 0) return max_model_size;
  return std::max<Index>(1, std::min({n / 2, 3 * expected_s, Index{50}}));
}

WeightScheme make_scheme(WeightKind kind, Index n, Index p, const SelectionConfig& config, double sigma2) {
  if (kind == WeightKind::uniform) return WeightScheme::uniform();
  if (!(sigma2 > 0.0)) throw ValidationError("make_scheme: sigma2 must be positive");
  const double lambda_ref =
      config.lambda_ref > 0.0 ? config.lambda_ref
                              : std::sqrt(sigma2 * config.lambda_ref_k * std::log(std::max<double>(p, 2.0)) / n);
  const double q = config.q > 0.0 ? config.q : default_q(n, config.criteria.zeta);
  return WeightScheme::scad_q(lambda_ref, q, config.scad_a);
}

namespace {

FitResult best_of(const Dataset& data, const LossSpec& spec, const WeightVector& w, double lambda,
                  const std::vector<Eigen::VectorXd>& starts, const SolverConfig& solver) {
  FitResult best;
  bool have = false;
  for (const auto& s : starts) {
    FitResult f = fit_one(data, spec, w, lambda, s, solver);
    if (!have || (f.converged && !best.converged) || (f.converged == best.converged && f.objective < best.objective)) {
      best = std::move(f);
      have = true;
    }
  }
  return best;
}

Eigen::VectorXd kl_solution(const Dataset& data, const LossSpec& spec, const WeightVector& w, double lambda,
                            const SolverConfig& solver) {
  const LossSpec kl{0.0, spec.sigma2};
  return fit_one(data, kl, w, lambda, Eigen::VectorXd::Zero(data.p()), solver).beta;
}

}  // namespace

double initial_lambda(const LossSpec& spec, double lambda_ref) {
  const MomentCoefficients m = spec.is_kl() ? kl_moment_coefficients(spec.sigma2) : moment_coefficients(spec);
  return lambda_ref * m.d_coeff;
}

Eigen::VectorXd initial_estimate(const Dataset& data, const LossSpec& spec, double lambda_ref,
                                 const SelectionConfig& config) {
  data.validate();
  const double lambda_init = initial_lambda(spec, lambda_ref);
  switch (config.initial) {
    case InitialEstimator::least_squares: {
      if (data.n() <= data.p()) throw ValidationError("least_squares initial estimator needs n > P");
      return data.X.colPivHouseholderQr().solve(data.y);
    }
    case InitialEstimator::ridge: {
      const double reg = static_cast<double>(data.n()) * config.ridge_lambda;
      Eigen::MatrixXd gram = data.X.transpose() * data.X;
      gram.diagonal().array() += reg;
      return gram.ldlt().solve(data.X.transpose() * data.y);
    }
    case InitialEstimator::bhhj_lasso: {
      const WeightVector uni = uniform_weights(data.p());
      std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(data.p())};
      if (!spec.is_kl()) starts.push_back(kl_solution(data, spec, uni, lambda_init, config.solver));
      return best_of(data, spec, uni, lambda_init, starts, config.solver).beta;
    }
  }
  throw ValidationError("unknown initial estimator");
}

SelectionRun select_many(const Dataset& data, const LossSpec& spec, const WeightScheme& scheme,
                         std::span<const double> grid, const SelectionConfig& config,
                         std::span<const CriterionKind> kinds) {
  data.validate();
  spec.validate();
  scheme.validate();
  config.validate();
  if (kinds.empty()) throw ValidationError("no criteria requested");

  SelectionRun run;
  run.max_model_size = config.resolved_max_model_size(data.n());

  PathOptions options;
  options.solver = config.solver;
  options.max_active = run.max_model_size;
  options.head_starts.push_back(Eigen::VectorXd::Zero(data.p()));

  if (scheme.kind == WeightKind::scad_q) {
    run.initial_estimate = initial_estimate(data, spec, scheme.lambda_ref, config);
    run.weights = build_weights(run.initial_estimate, scheme);
    options.head_starts.push_back(run.initial_estimate);
  } else {
    run.weights = uniform_weights(data.p());
  }
  if (!spec.is_kl() && !grid.empty())
    options.head_starts.push_back(kl_solution(data, spec, run.weights, grid.front(), config.solver));

  run.path = fit_path(data, spec, run.weights, grid, options);

  const bool any_log_det = std::any_of(kinds.begin(), kinds.end(), needs_log_det);
  run.results.resize(kinds.size());
  for (std::size_t c = 0; c < kinds.size(); ++c) {
    run.results[c].kind = kinds[c];
    run.results[c].points.reserve(run.path.points.size());
  }

  for (const FitResult& fit : run.path.points) {
    PathPointEval base;
    base.lambda = fit.lambda;
    base.nu = static_cast<Index>(fit.active_set.size());
    base.converged = fit.converged;
    base.status = fit.status;
    base.kkt_residual = fit.kkt_residual;
    base.excluded = base.nu > run.max_model_size;

    std::optional<EvalInputs> inputs;
    std::string log_det_failure;
    if (base.converged && !base.excluded) {
      try {
        inputs = gather_inputs(data, spec, fit, run.weights, false, config.solver.backend);
        if (any_log_det && base.nu > 0) {
          try {
            inputs->log_det_t =
                log_det_spd(t_matrix(data, spec, fit.beta, fit.active_set, config.solver.backend));
          } catch (const EvaluationFailure& e) {
            log_det_failure = e.what();
          }
        }
      } catch (const EvaluationFailure& e) {
        log_det_failure = e.what();
      }
    }

    for (std::size_t c = 0; c < kinds.size(); ++c) {
      PathPointEval pt = base;
      if (inputs) {
        if (needs_log_det(kinds[c]) && !log_det_failure.empty() && pt.nu > 0) {
          pt.eval_failed = true;
          pt.failure = log_det_failure;
        } else {
          try {
            pt.eval = evaluate(kinds[c], *inputs, config.criteria);
          } catch (const EvaluationFailure& e) {
            pt.eval_failed = true;
            pt.failure = e.what();
          }
        }
      }
      run.results[c].points.push_back(std::move(pt));
    }
  }

  for (auto& res : run.results) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < res.points.size(); ++k) {
      const auto& pt = res.points[k];
      // Strict comparison keeps the earliest (largest lambda) point on ties.
      if (pt.valid() && pt.eval->value < best) {
        best = pt.eval->value;
        res.chosen_index = static_cast<Index>(k);
      }
    }
    res.success = res.chosen_index >= 0;
    if (res.success) {
      const FitResult& fit = run.path.points[static_cast<std::size_t>(res.chosen_index)];
      res.chosen_lambda = fit.lambda;
      res.chosen_active_set = fit.active_set;
      res.chosen_beta = fit.beta;
    }
  }
  return run;
}

SelectionResult select(const Dataset& data, const LossSpec& spec, const WeightScheme& scheme,
                       std::span<const double> grid, const SelectionConfig& config, CriterionKind kind) {
  const CriterionKind kinds[] = {kind};
  return std::move(select_many(data, spec, scheme, grid, config, kinds).results.front());
}

std::string_view to_string(ModelClass c) {
  switch (c) {
    case ModelClass::UM: return "UM";
    case ModelClass::TM: return "TM";
    case ModelClass::OM: return "OM";
    case ModelClass::NC: return "NC";
  }
  return "unknown";
}

ModelClass classify(std::span<const Index> chosen, std::span<const Index> truth) {
  std::vector<Index> a(chosen.begin(), chosen.end());
  std::vector<Index> t(truth.begin(), truth.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  const bool covers = std::includes(a.begin(), a.end(), t.begin(), t.end());
  const bool within = std::includes(t.begin(), t.end(), a.begin(), a.end());
  if (covers && within) return ModelClass::TM;
  if (covers) return ModelClass::OM;
  if (within) return ModelClass::UM;
  return ModelClass::NC;
}

double concordance_rate(std::span<const Index> a, std::span<const Index> b, Index p) {
  if (p < 1) throw ValidationError("concordance_rate: P must be >= 1");
  std::vector<char> in_a(static_cast<std::size_t>(p), 0), in_b(static_cast<std::size_t>(p), 0);
  for (Index j : a) {
    if (j < 0 || j >= p) throw ValidationError("concordance_rate: index out of range");
    in_a[static_cast<std::size_t>(j)] = 1;
  }
  for (Index j : b) {
    if (j < 0 || j >= p) throw ValidationError("concordance_rate: index out of range");
    in_b[static_cast<std::size_t>(j)] = 1;
  }
  Index agree = 0;
  for (std::size_t j = 0; j < in_a.size(); ++j) agree += in_a[j] == in_b[j] ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(p);
}

}  // namespace dpdsel
