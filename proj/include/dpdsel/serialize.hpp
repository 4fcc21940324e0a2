#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpdsel/criteria.hpp"
#include "dpdsel/realdata.hpp"
#include "dpdsel/selection.hpp"
#include "dpdsel/simulation.hpp"
#include "dpdsel/solver.hpp"

namespace nlohmann {
template <>
struct adl_serializer<Eigen::VectorXd> {
  static void to_json(json& j, const Eigen::VectorXd& v);
  static void from_json(const json& j, Eigen::VectorXd& v);
};
}  // namespace nlohmann

namespace dpdsel {

using json = nlohmann::json;

void to_json(json& j, const LossSpec& v);
void from_json(const json& j, LossSpec& v);
void to_json(json& j, const WeightScheme& v);
void from_json(const json& j, WeightScheme& v);
void to_json(json& j, const WeightVector& v);
void from_json(const json& j, WeightVector& v);
void to_json(json& j, const FitResult& v);
void from_json(const json& j, FitResult& v);
void to_json(json& j, const PathFit& v);
void from_json(const json& j, PathFit& v);
void to_json(json& j, const CriterionComponents& v);
void from_json(const json& j, CriterionComponents& v);
void to_json(json& j, const ModelEval& v);
void from_json(const json& j, ModelEval& v);
void to_json(json& j, const PathPointEval& v);
void from_json(const json& j, PathPointEval& v);
void to_json(json& j, const SelectionResult& v);
void from_json(const json& j, SelectionResult& v);
void to_json(json& j, const RateRow& v);
void from_json(const json& j, RateRow& v);
void to_json(json& j, const RateTable& v);
void from_json(const json& j, RateTable& v);
void to_json(json& j, const MeanSd& v);
void from_json(const json& j, MeanSd& v);
void to_json(json& j, const RealDataRow& v);
void from_json(const json& j, RealDataRow& v);
void to_json(json& j, const RealDataReport& v);
void from_json(const json& j, RealDataReport& v);

/// One row per (label, r): counts plus UM/TM/OM percentages to one decimal.
void write_rate_csv(std::ostream& out, const RateTable& table);
/// Columns alpha, criterion, r, TM_rate over the adaptive rows.
void write_plot_csv(std::ostream& out, const RateTable& table);
void write_realdata_csv(std::ostream& out, const RealDataReport& report);

/// Write `text` to `path` through a temporary file and rename; throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace dpdsel
