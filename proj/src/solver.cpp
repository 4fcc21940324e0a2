#include "dpdsel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpdsel/error.hpp"

namespace dpdsel {

namespace {

double weighted_l1(const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
  return (w.array() * beta.array().abs()).sum();
}

std::vector<Index> support(const Eigen::VectorXd& beta) {
  std::vector<Index> out;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) out.push_back(j);
  }
  return out;
}

// grad is the gradient of the smooth part, -X' psi.
double kkt_from_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, const Eigen::VectorXd& w,
                         double n_lambda) {
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double bound = n_lambda * w[j];
    const double v = beta[j] != 0.0 ? std::abs(grad[j] + std::copysign(bound, beta[j]))
                                    : std::max(0.0, std::abs(grad[j]) - bound);
    worst = std::max(worst, v);
  }
  return worst;
}

void check_dims(const Dataset& data, const WeightVector& w, const Eigen::VectorXd& beta0) {
  if (w.size() != data.p())
    throw ValidationError("weight vector has length " + std::to_string(w.size()) + ", expected " +
                          std::to_string(data.p()));
  if (beta0.size() != data.p())
    throw ValidationError("start vector has length " + std::to_string(beta0.size()) + ", expected " +
                          std::to_string(data.p()));
  if (!beta0.allFinite()) throw ValidationError("start vector must be finite");
  if ((w.w.array() < 0.0).any() || !w.w.allFinite()) throw ValidationError("weights must be finite and >= 0");
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw ValidationError("dataset needs n >= 1 and P >= 1");
  if (y.size() != X.rows())
    throw ValidationError("response length " + std::to_string(y.size()) + " does not match n = " +
                          std::to_string(X.rows()));
  if (!X.allFinite()) throw ValidationError("design matrix has non-finite entries");
  if (!y.allFinite()) throw ValidationError("response has non-finite entries");
}

void SolverConfig::validate() const {
  if (!(tol_obj > 0.0)) throw ValidationError("solver.tol_obj must be > 0");
  if (!(tol_kkt > 0.0)) throw ValidationError("solver.tol_kkt must be > 0");
  if (max_iter < 1) throw ValidationError("solver.max_iter must be >= 1");
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::step_collapse: return "step_collapse";
  }
  return "unknown";
}

double penalized_objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& w, double lambda,
                           const Eigen::VectorXd& beta) {
  const DpdLoss loss(spec);
  const Eigen::VectorXd r = data.y - data.X * beta;
  double total = 0.0;
  for (Index i = 0; i < r.size(); ++i) total += loss.rho(r[i]);
  return total + static_cast<double>(data.n()) * lambda * weighted_l1(w, beta);
}

FitResult fit_one(const Dataset& data, const LossSpec& spec, const WeightVector& weights, double lambda,
                  const Eigen::VectorXd& beta0, const SolverConfig& config) {
  data.validate();
  config.validate();
  check_dims(data, weights, beta0);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");

  const DpdLoss loss(spec);
  const Backend backend = config.backend;
  const auto& X = data.X;
  const auto& w = weights.w;
  const Index n = data.n();
  const Index p = data.p();
  const double n_lambda = static_cast<double>(n) * lambda;
  const double kkt_bound = config.tol_kkt * static_cast<double>(n);

  Eigen::VectorXd beta = beta0;
  double max_col_sq = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double sq = X.col(j).squaredNorm();
    if (sq == 0.0) beta[j] = 0.0;  // the prox pins these at zero for any lambda > 0
    max_col_sq = std::max(max_col_sq, sq);
  }

  Eigen::VectorXd r, psi, grad;
  kernels::residuals(backend, X, data.y, beta, r);
  double smooth = kernels::loss_and_psi(backend, loss, r, psi);
  kernels::correlate(backend, X, psi, grad);
  grad = -grad;
  double obj = smooth + n_lambda * weighted_l1(w, beta);

  // max_j ||X_j||^2 underestimates the largest eigenvalue of X'X, so this
  // first step is optimistic and backtracking corrects it.
  const double t0 = 1.0 / (loss.curvature_bound() * std::max(max_col_sq, 1e-300));
  const double t_min = t0 * 1e-12;
  const double t_max = t0 * 1e12;
  double t = t0;

  FitResult out;
  out.lambda = lambda;
  out.status = FitStatus::max_iterations;
  double kkt = kkt_from_gradient(grad, beta, w, n_lambda);

  Eigen::VectorXd beta_new(p), r_new(n), psi_new(n), grad_new(p), d(p);
  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    // Backtracking: accept once the quadratic model majorises the loss.
    bool accepted = false;
    bool fixed_point = false;
    double smooth_new = 0.0;
    double obj_new = 0.0;
    while (t >= t_min) {
      beta_new = prox_weighted_l1(beta - t * grad, t * n_lambda, w);
      d = beta_new - beta;
      if ((d.array() == 0.0).all()) {
        fixed_point = true;
        break;
      }
      kernels::residuals(backend, X, data.y, beta_new, r_new);
      smooth_new = kernels::loss_sum(backend, loss, r_new);
      const double model = smooth + grad.dot(d) + d.squaredNorm() / (2.0 * t);
      obj_new = smooth_new + n_lambda * weighted_l1(w, beta_new);
      if (smooth_new <= model && obj_new <= obj) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }

    if (fixed_point) {
      // A prox fixed point is stationary; kkt reflects rounding only.
      out.status = FitStatus::converged;
      break;
    }
    if (!accepted) {
      out.status = kkt <= kkt_bound ? FitStatus::converged : FitStatus::step_collapse;
      break;
    }

    kernels::loss_and_psi(backend, loss, r_new, psi_new);
    kernels::correlate(backend, X, psi_new, grad_new);
    grad_new = -grad_new;

    const double sy = d.dot(grad_new - grad);
    const double ss = d.squaredNorm();
    t = sy > 0.0 ? ss / sy : 2.0 * t;
    t = std::clamp(t, t_min * 1e3, t_max);

    const double rel_change = std::abs(obj - obj_new) / std::max(1.0, std::abs(obj_new));
    beta.swap(beta_new);
    r.swap(r_new);
    psi.swap(psi_new);
    grad.swap(grad_new);
    smooth = smooth_new;
    obj = obj_new;
    kkt = kkt_from_gradient(grad, beta, w, n_lambda);

    if (rel_change <= config.tol_obj && kkt <= kkt_bound) {
      ++iter;
      out.status = FitStatus::converged;
      break;
    }
  }

  out.beta = beta;
  out.iterations = iter;
  out.kkt_residual = kkt;
  out.converged = out.status == FitStatus::converged;
  out.objective = smooth + static_cast<double>(n) * loss.rho_at_zero() + n_lambda * weighted_l1(w, beta);
  out.active_set = support(beta);
  return out;
}

PathFit fit_path(const Dataset& data, const LossSpec& spec, const WeightVector& w, std::span<const double> lambdas,
                 const PathOptions& options) {
  if (lambdas.empty()) throw ValidationError("lambda grid is empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k]))
      throw ValidationError("lambda grid entry " + std::to_string(k) + " must be finite and > 0");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      throw ValidationError("lambda grid must be strictly decreasing (entry " + std::to_string(k) + ")");
  }

  PathFit path;
  path.weights = w;
  path.spec = spec;
  path.points.reserve(lambdas.size());

  std::vector<Eigen::VectorXd> heads = options.head_starts;
  if (heads.empty()) heads.push_back(Eigen::VectorXd::Zero(data.p()));

  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    FitResult fit;
    if (k == 0) {
      bool have = false;
      for (const auto& start : heads) {
        FitResult cand = fit_one(data, spec, w, lambdas[k], start, options.solver);
        // Prefer converged candidates, then the lower objective.
        if (!have || (cand.converged && !fit.converged) ||
            (cand.converged == fit.converged && cand.objective < fit.objective)) {
          fit = std::move(cand);
          have = true;
        }
      }
    } else {
      fit = fit_one(data, spec, w, lambdas[k], path.points.back().beta, options.solver);
    }
    const auto active = static_cast<Index>(fit.active_set.size());
    path.points.push_back(std::move(fit));
    if (options.max_active > 0 && active > options.max_active && k + 1 < lambdas.size()) {
      path.truncated = true;
      break;
    }
  }
  return path;
}

std::vector<double> default_lambda_grid(Index n, Index p, Index max_model_size, Index length) {
  if (length < 2) throw ValidationError("lambda grid length must be >= 2");
  const double centre = reference_lambda(n, p, max_model_size);
  const double hi = std::log(100.0 * centre);
  const double lo = std::log(0.01 * centre);
  std::vector<double> grid(static_cast<std::size_t>(length));
  for (Index k = 0; k < length; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(length - 1);
    grid[static_cast<std::size_t>(k)] = std::exp(hi + frac * (lo - hi));
  }
  grid.front() = 100.0 * centre;
  grid.back() = 0.01 * centre;
  return grid;
}

}  // namespace dpdsel
