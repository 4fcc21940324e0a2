#include "dpdsel/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dpdsel/error.hpp"

namespace dpdsel {

std::string_view to_string(Sigma2Mode m) {
  return m == Sigma2Mode::true_value ? "true" : "estimated";
}

void SimScenario::validate() const {
  if (n < 2) throw ValidationError("scenario.n must be >= 2");
  if (p < 1) throw ValidationError("scenario.p must be >= 1");
  if (s < 0 || s > p) throw ValidationError("scenario.s must lie in [0, p]");
  if (beta_star.size() != 0) {
    if (beta_star.size() != p) throw ValidationError("scenario.beta_star must have length p");
    if (!beta_star.allFinite()) throw ValidationError("scenario.beta_star must be finite");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("scenario.sigma2 must be positive");
  if (contamination_rates.empty()) throw ValidationError("scenario.contamination_rates must be nonempty");
  for (double r : contamination_rates)
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("scenario.contamination_rates entries must lie in [0, 1]");
  if (!std::isfinite(outlier_multiplier)) throw ValidationError("scenario.outlier_multiplier must be finite");
  for (double a : alphas) LossSpec{a, 1.0}.validate();
  if (alphas.empty() && !uniform_baselines) throw ValidationError("scenario.alphas is empty and baselines are off");
  if (!alphas.empty() && criteria.empty()) throw ValidationError("scenario.criteria must be nonempty");
  if (trials < 1) throw ValidationError("scenario.trials must be >= 1");
  if (grid_length < 2) throw ValidationError("scenario.grid_length must be >= 2");
  selection.validate();
}

Eigen::VectorXd SimScenario::resolved_beta_star() const {
  if (beta_star.size() != 0) return beta_star;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  b.head(s).setOnes();
  return b;
}

std::vector<Index> SimScenario::truth() const {
  const Eigen::VectorXd b = resolved_beta_star();
  std::vector<Index> t;
  for (Index j = 0; j < b.size(); ++j)
    if (b(j) != 0.0) t.push_back(j);
  return t;
}

Eigen::MatrixXd design_matrix(const SimScenario& scenario) {
  Rng rng = substream(scenario.seed, {stream::design});
  return standard_normal(rng, scenario.n, scenario.p);
}

SimInstance generate_instance(const SimScenario& scenario, const Eigen::MatrixXd& x, std::uint64_t trial) {
  if (x.rows() != scenario.n || x.cols() != scenario.p) throw ValidationError("design does not match scenario");
  Rng rng = substream(scenario.seed, {stream::noise, trial});
  const Eigen::VectorXd eps = std::sqrt(scenario.sigma2) * standard_normal(rng, scenario.n, 1).col(0);
  SimInstance inst;
  inst.data.X = x;
  inst.data.y = x * scenario.resolved_beta_star() + eps;
  inst.data.y.array() -= inst.data.y.mean();
  inst.truth = scenario.truth();
  return inst;
}

SimInstance generate_instance(const SimScenario& scenario, std::uint64_t trial) {
  return generate_instance(scenario, design_matrix(scenario), trial);
}

Contamination contaminate(const Eigen::VectorXd& y, double r, double multiplier, Rng& rng) {
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("contaminate: r must lie in [0, 1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Contamination c{y, {}};
  // One uniform per entry regardless of r, so masks for increasing r are nested.
  for (Index i = 0; i < y.size(); ++i) {
    if (unif(rng) < r) {
      c.y(i) = multiplier * y(i);
      c.mask.push_back(i);
    }
  }
  return c;
}

double estimate_sigma2(const Dataset& data, double lambda0, const SolverConfig& solver, bool scaled) {
  data.validate();
  if (!(lambda0 > 0.0)) throw ValidationError("estimate_sigma2: lambda must be positive");
  const WeightVector w = uniform_weights(data.p());
  const LossSpec ls{0.0, 1.0};
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.p());
  double s2 = (data.y.array() - data.y.mean()).square().sum() / static_cast<double>(data.n() - 1);
  const int rounds = scaled ? 50 : 1;
  for (int it = 0; it < rounds; ++it) {
    const double lambda = scaled ? lambda0 * std::sqrt(s2) : lambda0;
    const FitResult fit = fit_one(data, ls, w, lambda, beta, solver);
    const Index nu = static_cast<Index>(fit.active_set.size());
    if (nu >= data.n()) throw NumericalError("estimate_sigma2: no residual degrees of freedom");
    const double next = (data.y - data.X * fit.beta).squaredNorm() / static_cast<double>(data.n() - nu);
    if (!(next > 0.0)) throw NumericalError("estimate_sigma2: zero residual variance");
    beta = fit.beta;
    const bool settled = std::abs(next - s2) <= 1e-6 * s2;
    s2 = next;
    if (settled) break;
  }
  return s2;
}

double RateRow::um_pct() const noexcept { return scored() ? 100.0 * um / scored() : 0.0; }
double RateRow::tm_pct() const noexcept { return scored() ? 100.0 * tm / scored() : 0.0; }
double RateRow::om_pct() const noexcept { return scored() ? 100.0 * om / scored() : 0.0; }

const RateRow& RateTable::find(const std::string& label, double r) const {
  for (const auto& row : rows)
    if (row.label == label && std::abs(row.r - r) < 1e-12) return row;
  throw std::out_of_range("no rate row '" + label + "' at r=" + std::to_string(r));
}

double round_pct(double v) { return std::round(v * 10.0) / 10.0; }

namespace {

std::string alpha_label(CriterionKind kind, double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s (%g)", std::string(to_string(kind)).c_str(), alpha);
  return buf;
}

struct Column {
  std::string label;
  CriterionKind kind;
  double alpha;
  bool uniform;
};

enum Outcome : signed char { o_um, o_tm, o_om, o_nc, o_failed };

struct TrialResult {
  std::vector<signed char> outcome;  ///< [column * R + r_index]
  double worst_kkt = 0.0;
  long nonconverged = 0;
  long points = 0;
  std::string failure;
  bool ran = false;
};

void tally_path(const SelectionRun& run, Index n, TrialResult& tr) {
  for (const auto& f : run.path.points) {
    ++tr.points;
    if (f.converged)
      tr.worst_kkt = std::max(tr.worst_kkt, f.kkt_residual / static_cast<double>(n));
    else
      ++tr.nonconverged;
  }
}

signed char outcome_of(const SelectionResult& res, const std::vector<Index>& truth) {
  if (!res.success) return o_failed;
  switch (classify(res.chosen_active_set, truth)) {
    case ModelClass::UM: return o_um;
    case ModelClass::TM: return o_tm;
    case ModelClass::OM: return o_om;
    case ModelClass::NC: return o_nc;
  }
  return o_failed;
}

}  // namespace

RateTable run_scenario(const SimScenario& scenario, const RunControl& control) {
  scenario.validate();
  if (control.workers < 1) throw ValidationError("workers must be >= 1");

  std::vector<Column> columns;
  for (double a : scenario.alphas)
    for (CriterionKind k : scenario.criteria) columns.push_back({alpha_label(k, a), k, a, false});
  if (scenario.uniform_baselines) {
    columns.push_back({"unif-BIC", CriterionKind::dbbc, 0.0, true});
    columns.push_back({"unif-EBIC", CriterionKind::edbbc, 0.0, true});
  }
  const std::size_t n_r = scenario.contamination_rates.size();
  const std::size_t n_crit = scenario.criteria.size();
  const int trials = scenario.trials;

  const Eigen::MatrixXd x = design_matrix(scenario);
  const Index s_cap = scenario.selection.resolved_max_model_size(scenario.n);
  const std::vector<double> grid = default_lambda_grid(scenario.n, scenario.p, s_cap, scenario.grid_length);
  const double lambda0 = reference_lambda(scenario.n, scenario.p, scenario.selection.expected_s);
  const CriterionKind baseline_kinds[] = {CriterionKind::dbbc, CriterionKind::edbbc};

  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::atomic<int> done{0};

#pragma omp parallel for schedule(dynamic, 1) num_threads(control.workers)
  for (int t = 0; t < trials; ++t) {
    if (control.stop && control.stop->load()) continue;
    TrialResult& tr = results[static_cast<std::size_t>(t)];
    tr.outcome.assign(columns.size() * n_r, o_failed);
    try {
      const SimInstance inst = generate_instance(scenario, x, static_cast<std::uint64_t>(t));
      for (std::size_t ri = 0; ri < n_r; ++ri) {
        Rng rng = substream(scenario.seed, {stream::contamination, static_cast<std::uint64_t>(t)});
        Dataset data{inst.data.X,
                     contaminate(inst.data.y, scenario.contamination_rates[ri], scenario.outlier_multiplier, rng).y};
        double sigma2 = scenario.sigma2;
        if (scenario.sigma2_mode == Sigma2Mode::estimated)
          sigma2 = estimate_sigma2(data, lambda0, scenario.selection.solver);
        const WeightScheme adaptive =
            make_scheme(WeightKind::scad_q, scenario.n, scenario.p, scenario.selection, sigma2);

        std::size_t col = 0;
        for (double a : scenario.alphas) {
          const SelectionRun run =
              select_many(data, LossSpec{a, sigma2}, adaptive, grid, scenario.selection, scenario.criteria);
          tally_path(run, scenario.n, tr);
          for (std::size_t c = 0; c < n_crit; ++c, ++col) tr.outcome[col * n_r + ri] = outcome_of(run.results[c], inst.truth);
        }
        if (scenario.uniform_baselines) {
          const SelectionRun run =
              select_many(data, LossSpec{0.0, sigma2}, WeightScheme::uniform(), grid, scenario.selection, baseline_kinds);
          tally_path(run, scenario.n, tr);
          for (std::size_t c = 0; c < 2; ++c, ++col) tr.outcome[col * n_r + ri] = outcome_of(run.results[c], inst.truth);
        }
      }
    } catch (const std::exception& e) {
      tr.failure = "trial " + std::to_string(t) + ": " + e.what();
    }
    tr.ran = true;
    const int d = ++done;
    if (control.progress) {
#pragma omp critical(dpdsel_progress)
      control.progress(d, trials);
    }
  }

  RateTable table;
  table.n = scenario.n;
  table.p = scenario.p;
  table.trials_requested = trials;
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t ri = 0; ri < n_r; ++ri) {
      RateRow row;
      row.label = columns[c].label;
      row.kind = columns[c].kind;
      row.alpha = columns[c].alpha;
      row.uniform = columns[c].uniform;
      row.r = scenario.contamination_rates[ri];
      table.rows.push_back(row);
    }

  // Reduce the completed prefix in trial order.
  for (const TrialResult& tr : results) {
    if (!tr.ran) break;
    ++table.trials_completed;
    table.worst_kkt_over_n = std::max(table.worst_kkt_over_n, tr.worst_kkt);
    table.nonconverged_points += tr.nonconverged;
    table.path_points += tr.points;
    if (!tr.failure.empty()) table.failure_messages.push_back(tr.failure);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      RateRow& row = table.rows[k];
      switch (tr.outcome[k]) {
        case o_um: ++row.um; break;
        case o_tm: ++row.tm; break;
        case o_om: ++row.om; break;
        case o_nc:
          ++row.nc;
          if (scenario.mixed_as_under) ++row.um;
          break;
        default: ++row.failed; break;
      }
    }
  }
  table.complete = table.trials_completed == trials;
  return table;
}

}  // namespace dpdsel
