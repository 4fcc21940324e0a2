#include "dpdsel/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace dpdsel {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

ModelEval finish(CriterionKind kind, const EvalInputs& in, const CriterionComponents& c) {
  ModelEval e;
  e.nu = in.nu;
  e.m_n = in.m_n;
  e.kind = kind;
  e.components = c;
  e.value = c.sum();
  return e;
}

double main_term(const EvalInputs& in) { return -2.0 * in.m_n + 2.0 * in.normal_constant; }

double ln(Index v) { return std::log(static_cast<double>(v)); }

}  // namespace

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::dbbc: return "DBBC";
    case CriterionKind::edbbc: return "E-DBBC";
    case CriterionKind::gedbbc_exact: return "GE-DBBC-exact";
    case CriterionKind::gedbbc_practical: return "GE-DBBC";
  }
  return "unknown";
}

std::optional<CriterionKind> parse_criterion(std::string_view name, bool exact_ge) {
  const std::string u = upper(name);
  if (u == "DBBC" || u == "BIC") return CriterionKind::dbbc;
  if (u == "EDBBC" || u == "EBIC") return CriterionKind::edbbc;
  if (u == "GEDBBC") return exact_ge ? CriterionKind::gedbbc_exact : CriterionKind::gedbbc_practical;
  if (u == "GEDBBC_EXACT" || u == "GEDBBCEXACT") return CriterionKind::gedbbc_exact;
  if (u == "GEDBBC_PRACTICAL" || u == "GEDBBCPRACTICAL") return CriterionKind::gedbbc_practical;
  return std::nullopt;
}

void CriteriaConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("criteria.gamma must lie strictly inside (0, 1), got " + std::to_string(gamma));
  if (!(zeta > 1.5) || !std::isfinite(zeta))
    throw ValidationError("criteria.zeta must be > 3/2, got " + std::to_string(zeta));
}

double quasi_likelihood(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& beta) {
  if (beta.size() != data.p()) throw ValidationError("quasi_likelihood: beta has wrong length");
  const DpdLoss loss(spec);
  const Eigen::VectorXd r = data.y - data.X * beta;
  double total = 0.0;
  for (Index i = 0; i < r.size(); ++i) total += loss.rho(r[i]);
  return -total;
}

double normal_constant(const LossSpec& spec, Index n) {
  if (!spec.is_kl()) return 0.0;
  return 0.5 * static_cast<double>(n) * (kLog2Pi + std::log(spec.sigma2));
}

Eigen::MatrixXd t_matrix(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& beta,
                         std::span<const Index> active, Backend backend) {
  if (active.empty()) throw ValidationError("t_matrix: active set is empty (log-det undefined)");
  if (beta.size() != data.p()) throw ValidationError("t_matrix: beta has wrong length");
  for (Index j : active) {
    if (j < 0 || j >= data.p()) throw ValidationError("t_matrix: active index out of range");
  }
  const DpdLoss loss(spec);
  Eigen::VectorXd r;
  kernels::residuals(backend, data.X, data.y, beta, r);
  Eigen::VectorXd c(r.size());
  for (Index i = 0; i < r.size(); ++i) c[i] = loss.psi_prime(r[i]);
  return kernels::weighted_gram(backend, data.X, active, c) / static_cast<double>(data.n());
}

double log_det_spd(const Eigen::MatrixXd& t) {
  if (t.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(t);
  if (llt.info() != Eigen::Success) throw EvaluationFailure("T_n is not positive definite; log-det undefined");
  const auto& l = llt.matrixL();
  double acc = 0.0;
  for (Index i = 0; i < t.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) throw EvaluationFailure("T_n is singular; log-det undefined");
    acc += std::log(d);
  }
  return 2.0 * acc;
}

ModelEval dbbc(const EvalInputs& in) {
  CriterionComponents c;
  c.main = main_term(in);
  c.log_n = static_cast<double>(in.nu) * ln(in.n);
  return finish(CriterionKind::dbbc, in, c);
}

ModelEval edbbc(const EvalInputs& in, const CriteriaConfig& config) {
  config.validate();
  CriterionComponents c;
  c.main = main_term(in);
  c.log_n = static_cast<double>(in.nu) * ln(in.n);
  c.log_p = 2.0 * (1.0 - config.gamma) * static_cast<double>(in.nu) * ln(in.p);
  return finish(CriterionKind::edbbc, in, c);
}

ModelEval gedbbc_exact(const EvalInputs& in, const CriteriaConfig& config) {
  config.validate();
  if (in.nu < 1) throw ValidationError("gedbbc_exact: needs a nonempty active set");
  if (!in.prior_defined) throw EvaluationFailure("gedbbc_exact: an active weight is zero; log prior undefined");
  const double nu = static_cast<double>(in.nu);
  CriterionComponents c;
  c.main = main_term(in);
  c.prior = -2.0 * in.log_prior;
  c.log_n = nu * ln(in.n);
  c.log_2pi = -nu * kLog2Pi;
  c.log_det = in.log_det_t;
  c.log_p = 2.0 * (1.0 - config.gamma) * nu * ln(in.p);
  return finish(CriterionKind::gedbbc_exact, in, c);
}

ModelEval gedbbc_practical(const EvalInputs& in, const CriteriaConfig& config) {
  config.validate();
  if (in.nu < 1) throw ValidationError("gedbbc_practical: needs a nonempty active set");
  if (!(in.lambda > 0.0)) throw ValidationError("gedbbc_practical: lambda must be > 0");
  const double nu = static_cast<double>(in.nu);
  CriterionComponents c;
  c.main = main_term(in);
  c.prior = -2.0 * nu * std::log(in.lambda);
  c.log_n = (2.0 * config.zeta - 1.0) * nu * ln(in.n);
  c.log_p = 2.0 * (1.0 - config.gamma) * nu * ln(in.p);
  c.log_det = in.log_det_t;
  return finish(CriterionKind::gedbbc_practical, in, c);
}

ModelEval evaluate(CriterionKind kind, const EvalInputs& in, const CriteriaConfig& config) {
  if (in.nu == 0) {
    config.validate();
    CriterionComponents c;
    c.main = main_term(in);
    return finish(kind, in, c);
  }
  switch (kind) {
    case CriterionKind::dbbc: return dbbc(in);
    case CriterionKind::edbbc: return edbbc(in, config);
    case CriterionKind::gedbbc_exact: return gedbbc_exact(in, config);
    case CriterionKind::gedbbc_practical: return gedbbc_practical(in, config);
  }
  throw ValidationError("unknown criterion kind");
}

bool needs_log_det(CriterionKind kind) {
  return kind == CriterionKind::gedbbc_exact || kind == CriterionKind::gedbbc_practical;
}

EvalInputs gather_inputs(const Dataset& data, const LossSpec& spec, const FitResult& fit, const WeightVector& w,
                         bool with_log_det, Backend backend) {
  EvalInputs in;
  in.n = data.n();
  in.p = data.p();
  in.nu = static_cast<Index>(fit.active_set.size());
  in.lambda = fit.lambda;
  in.m_n = quasi_likelihood(data, spec, fit.beta);
  in.normal_constant = normal_constant(spec, data.n());
  if (in.nu > 0) {
    Eigen::VectorXd b(in.nu), wa(in.nu);
    for (Index k = 0; k < in.nu; ++k) {
      const Index j = fit.active_set[static_cast<std::size_t>(k)];
      b[k] = fit.beta[j];
      wa[k] = w.w[j];
    }
    in.prior_defined = (wa.array() > 0.0).all() && fit.lambda > 0.0;
    if (in.prior_defined) in.log_prior = log_prior(b, wa, data.n(), fit.lambda);
    if (with_log_det) in.log_det_t = log_det_spd(t_matrix(data, spec, fit.beta, fit.active_set, backend));
  }
  return in;
}

}  // namespace dpdsel
