#include <doctest.h>

#include <string>

#include "config.hpp"
#include "dpdsel/error.hpp"

using namespace dpdsel;
using nlohmann::json;

namespace {

std::string failure(const json& j, const std::string& cmd) {
  try {
    cli::parse_run_config(j, cmd);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a full select config parses") {
  const json j = json::parse(R"({
    "seed": 7,
    "data": {"csv": "d.csv", "response": "MEDV"},
    "loss": {"alpha": 0.1, "sigma2": 2.0},
    "weights": {"kind": "scad_q"},
    "grid": {"length": 20},
    "criteria": {"gamma": 0.4},
    "selection": {"criterion": "GE-DBBC", "max_model_size": 50}
  })");
  const auto c = cli::parse_run_config(j, "select");
  CHECK(c.seed == 7);
  CHECK(c.data.response == "MEDV");
  CHECK(c.loss.alpha == 0.1);
  CHECK(c.grid_length == 20);
  CHECK(c.selection.criteria.gamma == 0.4);
  CHECK(c.criterion == CriterionKind::gedbbc_practical);
  CHECK(c.selection.max_model_size == 50);
}

TEST_CASE("validation errors name the offending field") {
  const json base = json::parse(R"({"data": {"csv": "d.csv"}})");
  json j = base;
  j["selection"] = {{"criterion", "AIC"}};
  CHECK(failure(j, "select").find("selection.criterion") != std::string::npos);

  j = base;
  j["loss"] = {{"alpha", -1.0}};
  CHECK(failure(j, "select").find("loss") != std::string::npos);

  j = base;
  j["loss"] = {{"alhpa", 0.1}};
  CHECK(failure(j, "select").find("loss.alhpa") != std::string::npos);

  j = base;
  j["criteria"] = {{"gamma", "half"}};
  CHECK(failure(j, "select").find("criteria.gamma") != std::string::npos);

  j = base;
  CHECK(failure(j, "fit").find("lambda") != std::string::npos);
  CHECK(failure(json::object(), "select").find("data.csv") != std::string::npos);

  j = json::parse(R"({"scenario": {"criteria": ["DBBC", "XBIC"]}})");
  CHECK(failure(j, "simulate").find("scenario.criteria") != std::string::npos);
}

TEST_CASE("overrides patch nested fields") {
  json j = json::parse(R"({"scenario": {"n": 100}})");
  cli::apply_overrides(j, {"scenario.n=40", "scenario.alphas=[0.5]", "realdata.response=PRICE", "seed=3"});
  CHECK(j["scenario"]["n"] == 40);
  CHECK(j["scenario"]["alphas"] == json::array({0.5}));
  CHECK(j["realdata"]["response"] == "PRICE");
  const auto c = cli::parse_run_config(j, "simulate");
  CHECK(c.scenario.n == 40);
  CHECK(c.seed == 3);
  CHECK_THROWS_AS(cli::apply_overrides(j, {"novalue"}), ValidationError);
}
