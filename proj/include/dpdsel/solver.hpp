#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpdsel/kernels.hpp"
#include "dpdsel/loss.hpp"
#include "dpdsel/penalty.hpp"

namespace dpdsel {

using Eigen::Index;

/// Fixed design X (n x P) and response y (n).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Index n() const noexcept { return X.rows(); }
  Index p() const noexcept { return X.cols(); }
  void validate() const;
};

struct SolverConfig {
  double tol_obj = 1e-8;  ///< relative objective change
  double tol_kkt = 1e-6;  ///< KKT residual bound is tol_kkt * n
  int max_iter = 10000;
  Backend backend = Backend::openmp;

  void validate() const;
};

enum class FitStatus { converged, max_iterations, step_collapse };

std::string_view to_string(FitStatus s);

struct FitResult {
  Eigen::VectorXd beta;
  double lambda = 0.0;
  /// sum_i rho(y_i - x_i' beta) + n lambda sum_j w_j |beta_j|
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  FitStatus status = FitStatus::max_iterations;
  /// Largest stationarity violation over coordinates (unscaled, compare with tol_kkt * n).
  double kkt_residual = 0.0;
  std::vector<Index> active_set;
};

/// Penalized objective evaluated directly (no shifted loss).
double penalized_objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& w, double lambda,
                           const Eigen::VectorXd& beta);

/// Minimise sum_i rho(y_i - x_i' beta) + n lambda ||w o beta||_1 from `beta0`.
///
/// Proximal gradient descent. Each step starts from a Barzilai-Borwein
/// estimate of the inverse curvature and backtracks until the quadratic upper
/// bound holds, so the objective never increases. Converges when the relative
/// objective change is below tol_obj and the KKT residual below tol_kkt * n.
/// For alpha > 0 the objective is non-convex and the stationary point reached
/// depends on beta0.
FitResult fit_one(const Dataset& data, const LossSpec& spec, const WeightVector& w, double lambda,
                  const Eigen::VectorXd& beta0, const SolverConfig& config = {});

struct PathOptions {
  SolverConfig solver;
  /// Candidate starts for the first grid point; the stationary point with the
  /// lowest objective is kept. Empty means start from zero.
  std::vector<Eigen::VectorXd> head_starts;
  /// Stop the path after the first point whose active set exceeds this size
  /// (0 disables).
  Index max_active = 0;
};

struct PathFit {
  std::vector<FitResult> points;  ///< lambda strictly decreasing
  WeightVector weights;
  LossSpec spec;
  bool truncated = false;  ///< stopped early by PathOptions::max_active
};

PathFit fit_path(const Dataset& data, const LossSpec& spec, const WeightVector& w, std::span<const double> lambdas,
                 const PathOptions& options = {});

/// Log-spaced grid from 100 lambda_c down to 0.01 lambda_c, lambda_c = sqrt(S log P / n).
std::vector<double> default_lambda_grid(Index n, Index p, Index max_model_size, Index length);

}  // namespace dpdsel
