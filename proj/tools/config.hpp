#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpdsel/criteria.hpp"
#include "dpdsel/penalty.hpp"
#include "dpdsel/realdata.hpp"
#include "dpdsel/selection.hpp"
#include "dpdsel/simulation.hpp"
#include "dpdsel/solver.hpp"

namespace dpdsel::cli {

struct DataConfig {
  std::string csv;
  std::string response = "y";
  bool center_response = true;
  bool standardize = false;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  DataConfig data;
  LossSpec loss;
  WeightKind weights = WeightKind::scad_q;
  std::optional<double> lambda;  ///< fit
  std::vector<double> lambdas;   ///< explicit grid; empty means default
  Index grid_length = 50;
  SelectionConfig selection;
  CriterionKind criterion = CriterionKind::edbbc;
  SimScenario scenario;
  RealDataConfig realdata;
};

nlohmann::json load_config(const std::filesystem::path& path);

/// Apply "a.b.c=value" overrides; value is parsed as JSON when possible, as a string otherwise.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

/// Parse and validate the sections `command` needs. Unknown keys, wrong
/// types and invariant violations raise ValidationError prefixed with the field path.
RunConfig parse_run_config(const nlohmann::json& config, const std::string& command);

}  // namespace dpdsel::cli
