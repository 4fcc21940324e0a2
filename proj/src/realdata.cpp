#include "dpdsel/realdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dpdsel/error.hpp"
#include "dpdsel/rng.hpp"

namespace dpdsel {

namespace {

constexpr double kVarianceFloor = 1e-12;

void column_stats(const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
  const double n = static_cast<double>(m.rows());
  mean = m.colwise().mean().transpose();
  sd.resize(m.cols());
  for (Index j = 0; j < m.cols(); ++j) sd(j) = std::sqrt((m.col(j).array() - mean(j)).square().sum() / (n - 1.0));
}

}  // namespace

void InteractionExpander::fit(const Eigen::MatrixXd& raw, bool interactions) {
  if (raw.cols() < 1) throw ValidationError("expand_interactions: need at least one column");
  if (raw.rows() < 2) throw ValidationError("expand_interactions: need at least two rows");
  if (!raw.allFinite()) throw ValidationError("expand_interactions: non-finite entry");
  interactions_ = interactions;
  column_stats(raw, raw_mean_, raw_sd_);
  for (Index j = 0; j < raw.cols(); ++j)
    if (!(raw_sd_(j) > kVarianceFloor))
      throw ValidationError("expand_interactions: column " + std::to_string(j) + " has zero variance");
  out_mean_.resize(0);
  out_sd_.resize(0);
  if (!interactions_) return;
  const Eigen::MatrixXd z = ((raw.rowwise() - raw_mean_.transpose()).array().rowwise() / raw_sd_.transpose().array()).matrix();
  const Eigen::MatrixXd prod = products(z);
  column_stats(prod, out_mean_, out_sd_);
  for (Index c = 0; c < prod.cols(); ++c)
    if (!(out_sd_(c) > kVarianceFloor))
      throw ValidationError("expand_interactions: product column " + std::to_string(raw.cols() + c) +
                            " has zero variance");
}

Eigen::MatrixXd InteractionExpander::products(const Eigen::MatrixXd& z) const {
  const Index d = z.cols();
  Eigen::MatrixXd out(z.rows(), d * (d - 1) / 2);
  Index c = 0;
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) out.col(c++) = z.col(j).cwiseProduct(z.col(k));
  return out;
}

Eigen::MatrixXd InteractionExpander::transform(const Eigen::MatrixXd& raw) const {
  if (raw.cols() != raw_mean_.size()) throw ValidationError("InteractionExpander: column count mismatch");
  const Eigen::MatrixXd z = ((raw.rowwise() - raw_mean_.transpose()).array().rowwise() / raw_sd_.transpose().array()).matrix();
  if (!interactions_) return z;
  const Eigen::MatrixXd prod = products(z);
  Eigen::MatrixXd out(raw.rows(), z.cols() + prod.cols());
  out.leftCols(z.cols()) = z;
  out.rightCols(prod.cols()) =
      ((prod.rowwise() - out_mean_.transpose()).array().rowwise() / out_sd_.transpose().array()).matrix();
  return out;
}

Eigen::MatrixXd expand_interactions(const Eigen::MatrixXd& raw) {
  InteractionExpander e;
  e.fit(raw);
  return e.transform(raw);
}

std::vector<std::string> interaction_names(const std::vector<std::string>& names) {
  std::vector<std::string> out(names);
  for (std::size_t j = 0; j < names.size(); ++j)
    for (std::size_t k = j + 1; k < names.size(); ++k) out.push_back(names[j] + ":" + names[k]);
  return out;
}

void RealDataConfig::validate() const {
  if (response.empty()) throw ValidationError("realdata.response must be set");
  if (repetitions < 1) throw ValidationError("realdata.repetitions must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("realdata.train_fraction must lie in (0, 1)");
  if (k < 0) throw ValidationError("realdata.k must be >= 0");
  if (!std::isfinite(m)) throw ValidationError("realdata.m must be finite");
  if (alphas.empty()) throw ValidationError("realdata.alphas must be nonempty");
  for (double a : alphas) LossSpec{a, 1.0}.validate();
  if (criteria.empty()) throw ValidationError("realdata.criteria must be nonempty");
  if (grid_length < 2) throw ValidationError("realdata.grid_length must be >= 2");
  if (!(sigma2_lambda >= 0.0)) throw ValidationError("realdata.sigma2_lambda must be >= 0");
  selection.validate();
}

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

const RealDataRow& RealDataReport::find(const std::string& label) const {
  for (const auto& row : rows)
    if (row.label == label) return row;
  throw std::out_of_range("no real-data row '" + label + "'");
}

namespace {

struct RepResult {
  bool ran = false;
  std::string failure;
  double sigma2 = 0.0;
  // Per row; NaN marks a failed selection.
  std::vector<double> rmse, nu, nu_raw, cr;
};

Dataset take_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<Index>& idx) {
  Dataset d{Eigen::MatrixXd(static_cast<Index>(idx.size()), x.cols()), Eigen::VectorXd(static_cast<Index>(idx.size()))};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    d.X.row(static_cast<Index>(i)) = x.row(idx[i]);
    d.y(static_cast<Index>(i)) = y(idx[i]);
  }
  return d;
}

}  // namespace

RealDataReport run_realdata(const Table& table, const RealDataConfig& config, const RunControl& control) {
  config.validate();
  if (control.workers < 1) throw ValidationError("workers must be >= 1");
  const Index resp = table.column(config.response);
  std::vector<Index> pred;
  for (const auto& name : config.exclude) table.column(name);
  for (Index j = 0; j < static_cast<Index>(table.columns.size()); ++j) {
    const auto& name = table.columns[static_cast<std::size_t>(j)];
    if (j == resp || std::find(config.exclude.begin(), config.exclude.end(), name) != config.exclude.end()) continue;
    pred.push_back(j);
  }
  if (pred.empty()) throw ValidationError("realdata: no predictor columns");

  const Index n = table.values.rows();
  const Index n_train = static_cast<Index>(std::lround(config.train_fraction * static_cast<double>(n)));
  if (n_train < 3 || n_train >= n) throw ValidationError("realdata: train_fraction leaves an empty split");
  if (config.k > n_train) throw ValidationError("realdata.k exceeds the training size");

  Eigen::MatrixXd x_raw(n, static_cast<Index>(pred.size()));
  for (std::size_t j = 0; j < pred.size(); ++j) x_raw.col(static_cast<Index>(j)) = table.values.col(pred[j]);
  const Eigen::VectorXd y_raw = table.values.col(resp);
  const Index d = x_raw.cols();
  const Index p = config.interactions ? d + d * (d - 1) / 2 : d;

  struct RowSpec {
    std::string label;
    CriterionKind kind;
    double alpha;
  };
  std::vector<RowSpec> specs;
  for (double a : config.alphas)
    for (CriterionKind kind : config.criteria) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s (%g)", std::string(to_string(kind)).c_str(), a);
      specs.push_back({buf, kind, a});
    }

  const Index s_cap = config.selection.resolved_max_model_size(n_train);
  const std::vector<double> grid = default_lambda_grid(n_train, p, s_cap, config.grid_length);
  const bool scaled = config.sigma2_lambda <= 0.0;
  const double sigma2_lambda =
      scaled ? reference_lambda(n_train, p, config.selection.expected_s) : config.sigma2_lambda;
  const int reps = config.repetitions;

  std::vector<RepResult> results(static_cast<std::size_t>(reps));
  std::atomic<int> done{0};

#pragma omp parallel for schedule(dynamic, 1) num_threads(control.workers)
  for (int rep = 0; rep < reps; ++rep) {
    if (control.stop && control.stop->load()) continue;
    RepResult& rr = results[static_cast<std::size_t>(rep)];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rr.rmse.assign(specs.size(), nan);
    rr.nu.assign(specs.size(), nan);
    rr.nu_raw.assign(specs.size(), nan);
    rr.cr.assign(specs.size(), nan);
    try {
      Rng rng = substream(config.seed, {stream::split, static_cast<std::uint64_t>(rep)});
      std::vector<Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      const std::vector<Index> train(perm.begin(), perm.begin() + n_train);
      const std::vector<Index> test(perm.begin() + n_train, perm.end());

      Dataset tr = take_rows(x_raw, y_raw, train);
      Dataset te = take_rows(x_raw, y_raw, test);
      InteractionExpander ex;
      ex.fit(tr.X, config.interactions);
      tr.X = ex.transform(tr.X);
      te.X = ex.transform(te.X);

      // Contaminate the raw response, then center each version on its own training mean.
      Eigen::VectorXd y_cont = tr.y;
      std::vector<Index> pos(static_cast<std::size_t>(n_train));
      std::iota(pos.begin(), pos.end(), Index{0});
      std::shuffle(pos.begin(), pos.end(), rng);
      for (Index i = 0; i < config.k; ++i) y_cont(pos[static_cast<std::size_t>(i)]) *= config.m;
      const double mean_raw = tr.y.mean();
      const double mean_cont = y_cont.mean();
      const Dataset raw{tr.X, (tr.y.array() - mean_raw).matrix()};
      const Dataset cont{tr.X, (y_cont.array() - mean_cont).matrix()};

      rr.sigma2 = estimate_sigma2(raw, sigma2_lambda, config.selection.solver, scaled);
      const double sigma2_cont =
          config.reestimate_sigma2 ? estimate_sigma2(cont, sigma2_lambda, config.selection.solver, scaled) : rr.sigma2;
      const WeightScheme scheme_raw = make_scheme(WeightKind::scad_q, n_train, p, config.selection, rr.sigma2);
      const WeightScheme scheme_cont = make_scheme(WeightKind::scad_q, n_train, p, config.selection, sigma2_cont);

      std::size_t row = 0;
      for (double a : config.alphas) {
        const SelectionRun sr = select_many(raw, LossSpec{a, rr.sigma2}, scheme_raw, grid, config.selection, config.criteria);
        const SelectionRun sc = select_many(cont, LossSpec{a, sigma2_cont}, scheme_cont, grid, config.selection, config.criteria);
        for (std::size_t c = 0; c < config.criteria.size(); ++c, ++row) {
          const SelectionResult& r0 = sr.results[c];
          const SelectionResult& r1 = sc.results[c];
          if (r0.success) rr.nu_raw[row] = static_cast<double>(r0.chosen_active_set.size());
          if (!r0.success || !r1.success) continue;
          rr.nu[row] = static_cast<double>(r1.chosen_active_set.size());
          rr.cr[row] = concordance_rate(r0.chosen_active_set, r1.chosen_active_set, p);
          const Eigen::VectorXd resid = (te.y.array() - mean_cont - (te.X * r1.chosen_beta).array()).matrix();
          rr.rmse[row] = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
        }
      }
    } catch (const std::exception& e) {
      rr.failure = "repetition " + std::to_string(rep) + ": " + e.what();
    }
    rr.ran = true;
    const int dn = ++done;
    if (control.progress) {
#pragma omp critical(dpdsel_progress)
      control.progress(dn, reps);
    }
  }

  RealDataReport report;
  report.n = n;
  report.n_train = n_train;
  report.n_test = n - n_train;
  report.p = p;
  report.repetitions_requested = reps;
  std::vector<double> sigma2s;
  std::vector<std::vector<double>> rmse(specs.size()), nu(specs.size()), nu_raw(specs.size()), cr(specs.size());
  std::vector<int> failures(specs.size(), 0);
  for (const RepResult& rr : results) {
    if (!rr.ran) break;
    ++report.repetitions_completed;
    if (!rr.failure.empty()) {
      report.failure_messages.push_back(rr.failure);
      for (auto& f : failures) ++f;
      continue;
    }
    sigma2s.push_back(rr.sigma2);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (!std::isnan(rr.nu_raw[k])) nu_raw[k].push_back(rr.nu_raw[k]);
      if (std::isnan(rr.cr[k])) {
        ++failures[k];
        continue;
      }
      rmse[k].push_back(rr.rmse[k]);
      nu[k].push_back(rr.nu[k]);
      cr[k].push_back(rr.cr[k]);
    }
  }
  report.sigma2 = mean_sd(sigma2s);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    RealDataRow row;
    row.label = specs[k].label;
    row.kind = specs[k].kind;
    row.alpha = specs[k].alpha;
    row.rmse = mean_sd(rmse[k]);
    row.nu = mean_sd(nu[k]);
    row.nu_raw = mean_sd(nu_raw[k]);
    row.cr = mean_sd(cr[k]);
    row.repetitions = static_cast<int>(cr[k].size());
    row.failures = failures[k];
    report.rows.push_back(row);
  }
  report.complete = report.repetitions_completed == reps;
  return report;
}

}  // namespace dpdsel
