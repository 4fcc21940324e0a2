#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpdsel/csv.hpp"
#include "dpdsel/criteria.hpp"
#include "dpdsel/selection.hpp"
#include "dpdsel/simulation.hpp"

namespace dpdsel {

/// Standardized raw columns followed by all pairwise products (j < k) of the
/// standardized columns, each product re-standardized. Statistics are fitted
/// once and can be applied to held-out rows.
class InteractionExpander {
 public:
  /// Throws ValidationError naming the first zero-variance raw column or product.
  void fit(const Eigen::MatrixXd& raw, bool interactions = true);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& raw) const;
  Eigen::Index output_columns() const noexcept { return out_mean_.size(); }

 private:
  Eigen::MatrixXd products(const Eigen::MatrixXd& z) const;

  bool interactions_ = true;
  Eigen::VectorXd raw_mean_, raw_sd_;
  Eigen::VectorXd out_mean_, out_sd_;  ///< for the product block only
};

Eigen::MatrixXd expand_interactions(const Eigen::MatrixXd& raw);
std::vector<std::string> interaction_names(const std::vector<std::string>& names);

struct RealDataConfig {
  std::string response = "MEDV";
  /// Columns to drop besides the response.
  std::vector<std::string> exclude;
  bool interactions = true;
  int repetitions = 100;
  double train_fraction = 0.8;
  Index k = 1;      ///< contaminated training responses
  double m = 10.0;  ///< contamination factor
  std::vector<double> alphas{0.0, 0.1};
  std::vector<CriterionKind> criteria{CriterionKind::dbbc, CriterionKind::edbbc, CriterionKind::gedbbc_practical};
  std::uint64_t seed = 1;
  Index grid_length = 50;
  SelectionConfig selection;
  /// Fixed lambda for the sigma2 LASSO; 0 means the scaled fixed point at
  /// sigma sqrt(expected_s log P / n).
  double sigma2_lambda = 0.0;
  /// Re-estimate sigma2 on the contaminated training set instead of reusing the raw one.
  bool reestimate_sigma2 = false;

  void validate() const;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  ///< sample standard deviation (n - 1)
};

MeanSd mean_sd(const std::vector<double>& v);

struct RealDataRow {
  std::string label;
  CriterionKind kind = CriterionKind::dbbc;
  double alpha = 0.0;
  MeanSd rmse;      ///< test RMSE of the fit on contaminated training data
  MeanSd nu;        ///< model size on contaminated training data
  MeanSd nu_raw;    ///< model size on raw training data
  MeanSd cr;        ///< concordance between raw and contaminated selections
  int repetitions = 0;  ///< repetitions that produced both selections
  int failures = 0;
};

struct RealDataReport {
  Index n = 0;
  Index n_train = 0;
  Index n_test = 0;
  Index p = 0;
  int repetitions_requested = 0;
  int repetitions_completed = 0;
  bool complete = false;
  MeanSd sigma2;
  std::vector<RealDataRow> rows;
  std::vector<std::string> failure_messages;

  const RealDataRow& find(const std::string& label) const;
};

RealDataReport run_realdata(const Table& table, const RealDataConfig& config, const RunControl& control = {});

}  // namespace dpdsel
