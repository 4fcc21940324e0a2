#include "dpdsel/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpdsel/error.hpp"

void nlohmann::adl_serializer<Eigen::VectorXd>::to_json(json& j, const Eigen::VectorXd& v) {
  j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
}

void nlohmann::adl_serializer<Eigen::VectorXd>::from_json(const json& j, Eigen::VectorXd& v) {
  v.resize(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
}

namespace dpdsel {

namespace {

CriterionKind kind_from(const json& j) {
  const std::string s = j.get<std::string>();
  if (auto k = parse_criterion(s, false)) return *k;
  throw ValidationError("unknown criterion '" + s + "'");
}

FitStatus status_from(const std::string& s) {
  if (s == "converged") return FitStatus::converged;
  if (s == "max_iterations") return FitStatus::max_iterations;
  if (s == "step_collapse") return FitStatus::step_collapse;
  throw ValidationError("unknown fit status '" + s + "'");
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void to_json(json& j, const LossSpec& v) { j = json{{"alpha", v.alpha}, {"sigma2", v.sigma2}}; }
void from_json(const json& j, LossSpec& v) {
  j.at("alpha").get_to(v.alpha);
  j.at("sigma2").get_to(v.sigma2);
}

void to_json(json& j, const WeightScheme& v) {
  j = json{{"kind", v.kind == WeightKind::uniform ? "uniform" : "scad_q"}, {"a", v.a}, {"q", v.q}, {"lambda_ref", v.lambda_ref}};
}
void from_json(const json& j, WeightScheme& v) {
  const std::string k = j.at("kind").get<std::string>();
  if (k == "uniform") v.kind = WeightKind::uniform;
  else if (k == "scad_q") v.kind = WeightKind::scad_q;
  else throw ValidationError("unknown weight scheme '" + k + "'");
  j.at("a").get_to(v.a);
  j.at("q").get_to(v.q);
  j.at("lambda_ref").get_to(v.lambda_ref);
}

void to_json(json& j, const WeightVector& v) {
  j = json{{"w", v.w}, {"scheme", v.scheme}, {"initial_estimate_hash", v.initial_estimate_hash}};
}
void from_json(const json& j, WeightVector& v) {
  j.at("w").get_to(v.w);
  j.at("scheme").get_to(v.scheme);
  j.at("initial_estimate_hash").get_to(v.initial_estimate_hash);
}

void to_json(json& j, const FitResult& v) {
  j = json{{"beta", v.beta},
           {"lambda", v.lambda},
           {"objective", v.objective},
           {"iterations", v.iterations},
           {"converged", v.converged},
           {"status", std::string(to_string(v.status))},
           {"kkt_residual", v.kkt_residual},
           {"active_set", v.active_set}};
}
void from_json(const json& j, FitResult& v) {
  j.at("beta").get_to(v.beta);
  j.at("lambda").get_to(v.lambda);
  j.at("objective").get_to(v.objective);
  j.at("iterations").get_to(v.iterations);
  j.at("converged").get_to(v.converged);
  v.status = status_from(j.at("status").get<std::string>());
  j.at("kkt_residual").get_to(v.kkt_residual);
  j.at("active_set").get_to(v.active_set);
}

void to_json(json& j, const PathFit& v) {
  j = json{{"spec", v.spec}, {"weights", v.weights}, {"truncated", v.truncated}, {"points", v.points}};
}
void from_json(const json& j, PathFit& v) {
  j.at("spec").get_to(v.spec);
  j.at("weights").get_to(v.weights);
  j.at("truncated").get_to(v.truncated);
  j.at("points").get_to(v.points);
}

void to_json(json& j, const CriterionComponents& v) {
  j = json{{"main", v.main},   {"log_n", v.log_n},     {"log_p", v.log_p},
           {"prior", v.prior}, {"log_2pi", v.log_2pi}, {"log_det", v.log_det}};
}
void from_json(const json& j, CriterionComponents& v) {
  j.at("main").get_to(v.main);
  j.at("log_n").get_to(v.log_n);
  j.at("log_p").get_to(v.log_p);
  j.at("prior").get_to(v.prior);
  j.at("log_2pi").get_to(v.log_2pi);
  j.at("log_det").get_to(v.log_det);
}

void to_json(json& j, const ModelEval& v) {
  j = json{{"nu", v.nu},
           {"m_n", v.m_n},
           {"kind", std::string(to_string(v.kind))},
           {"value", v.value},
           {"components", v.components}};
}
void from_json(const json& j, ModelEval& v) {
  j.at("nu").get_to(v.nu);
  j.at("m_n").get_to(v.m_n);
  v.kind = kind_from(j.at("kind"));
  j.at("value").get_to(v.value);
  j.at("components").get_to(v.components);
}

void to_json(json& j, const PathPointEval& v) {
  j = json{{"lambda", v.lambda},
           {"nu", v.nu},
           {"converged", v.converged},
           {"status", std::string(to_string(v.status))},
           {"kkt_residual", v.kkt_residual},
           {"excluded", v.excluded},
           {"eval_failed", v.eval_failed},
           {"failure", v.failure},
           {"eval", v.eval ? json(*v.eval) : json(nullptr)}};
}
void from_json(const json& j, PathPointEval& v) {
  j.at("lambda").get_to(v.lambda);
  j.at("nu").get_to(v.nu);
  j.at("converged").get_to(v.converged);
  v.status = status_from(j.at("status").get<std::string>());
  j.at("kkt_residual").get_to(v.kkt_residual);
  j.at("excluded").get_to(v.excluded);
  j.at("eval_failed").get_to(v.eval_failed);
  j.at("failure").get_to(v.failure);
  if (j.at("eval").is_null()) v.eval.reset();
  else v.eval = j.at("eval").get<ModelEval>();
}

void to_json(json& j, const SelectionResult& v) {
  j = json{{"kind", std::string(to_string(v.kind))},
           {"success", v.success},
           {"chosen_lambda", v.chosen_lambda},
           {"chosen_index", v.chosen_index},
           {"chosen_active_set", v.chosen_active_set},
           {"chosen_beta", v.chosen_beta},
           {"points", v.points}};
}
void from_json(const json& j, SelectionResult& v) {
  v.kind = kind_from(j.at("kind"));
  j.at("success").get_to(v.success);
  j.at("chosen_lambda").get_to(v.chosen_lambda);
  j.at("chosen_index").get_to(v.chosen_index);
  j.at("chosen_active_set").get_to(v.chosen_active_set);
  j.at("chosen_beta").get_to(v.chosen_beta);
  j.at("points").get_to(v.points);
}

void to_json(json& j, const RateRow& v) {
  j = json{{"label", v.label},   {"criterion", std::string(to_string(v.kind))},
           {"alpha", v.alpha},   {"r", v.r},
           {"uniform", v.uniform}, {"UM", v.um},
           {"TM", v.tm},         {"OM", v.om},
           {"NC", v.nc},        {"failed", v.failed},
           {"UM_pct", v.um_pct()}, {"TM_pct", v.tm_pct()},
           {"OM_pct", v.om_pct()}};
}
void from_json(const json& j, RateRow& v) {
  j.at("label").get_to(v.label);
  v.kind = kind_from(j.at("criterion"));
  j.at("alpha").get_to(v.alpha);
  j.at("r").get_to(v.r);
  j.at("uniform").get_to(v.uniform);
  j.at("UM").get_to(v.um);
  j.at("TM").get_to(v.tm);
  j.at("OM").get_to(v.om);
  j.at("NC").get_to(v.nc);
  j.at("failed").get_to(v.failed);
}

void to_json(json& j, const RateTable& v) {
  j = json{{"n", v.n},
           {"p", v.p},
           {"trials_requested", v.trials_requested},
           {"trials_completed", v.trials_completed},
           {"complete", v.complete},
           {"worst_kkt_over_n", v.worst_kkt_over_n},
           {"nonconverged_points", v.nonconverged_points},
           {"path_points", v.path_points},
           {"failure_messages", v.failure_messages},
           {"rows", v.rows}};
}
void from_json(const json& j, RateTable& v) {
  j.at("n").get_to(v.n);
  j.at("p").get_to(v.p);
  j.at("trials_requested").get_to(v.trials_requested);
  j.at("trials_completed").get_to(v.trials_completed);
  j.at("complete").get_to(v.complete);
  j.at("worst_kkt_over_n").get_to(v.worst_kkt_over_n);
  j.at("nonconverged_points").get_to(v.nonconverged_points);
  j.at("path_points").get_to(v.path_points);
  j.at("failure_messages").get_to(v.failure_messages);
  j.at("rows").get_to(v.rows);
}

void to_json(json& j, const MeanSd& v) { j = json{{"mean", v.mean}, {"sd", v.sd}}; }
void from_json(const json& j, MeanSd& v) {
  j.at("mean").get_to(v.mean);
  j.at("sd").get_to(v.sd);
}

void to_json(json& j, const RealDataRow& v) {
  j = json{{"label", v.label}, {"criterion", std::string(to_string(v.kind))},
           {"alpha", v.alpha}, {"rmse", v.rmse},
           {"nu", v.nu},       {"nu_raw", v.nu_raw},
           {"cr", v.cr},       {"repetitions", v.repetitions},
           {"failures", v.failures}};
}
void from_json(const json& j, RealDataRow& v) {
  j.at("label").get_to(v.label);
  v.kind = kind_from(j.at("criterion"));
  j.at("alpha").get_to(v.alpha);
  j.at("rmse").get_to(v.rmse);
  j.at("nu").get_to(v.nu);
  j.at("nu_raw").get_to(v.nu_raw);
  j.at("cr").get_to(v.cr);
  j.at("repetitions").get_to(v.repetitions);
  j.at("failures").get_to(v.failures);
}

void to_json(json& j, const RealDataReport& v) {
  j = json{{"n", v.n},
           {"n_train", v.n_train},
           {"n_test", v.n_test},
           {"p", v.p},
           {"repetitions_requested", v.repetitions_requested},
           {"repetitions_completed", v.repetitions_completed},
           {"complete", v.complete},
           {"sigma2", v.sigma2},
           {"failure_messages", v.failure_messages},
           {"rows", v.rows}};
}
void from_json(const json& j, RealDataReport& v) {
  j.at("n").get_to(v.n);
  j.at("n_train").get_to(v.n_train);
  j.at("n_test").get_to(v.n_test);
  j.at("p").get_to(v.p);
  j.at("repetitions_requested").get_to(v.repetitions_requested);
  j.at("repetitions_completed").get_to(v.repetitions_completed);
  j.at("complete").get_to(v.complete);
  j.at("sigma2").get_to(v.sigma2);
  j.at("failure_messages").get_to(v.failure_messages);
  j.at("rows").get_to(v.rows);
}

void write_rate_csv(std::ostream& out, const RateTable& table) {
  out << "label,criterion,alpha,weights,r,UM,TM,OM,NC,failed,UM_pct,TM_pct,OM_pct\n";
  for (const auto& row : table.rows) {
    out << '"' << row.label << "\"," << to_string(row.kind) << ',' << fmt(row.alpha) << ','
        << (row.uniform ? "uniform" : "scad_q") << ',' << fmt(row.r) << ',' << row.um << ',' << row.tm << ','
        << row.om << ',' << row.nc << ',' << row.failed << ',' << fmt(round_pct(row.um_pct()), "%.1f") << ','
        << fmt(round_pct(row.tm_pct()), "%.1f") << ',' << fmt(round_pct(row.om_pct()), "%.1f") << '\n';
  }
}

void write_plot_csv(std::ostream& out, const RateTable& table) {
  out << "alpha,criterion,r,TM_rate\n";
  for (const auto& row : table.rows) {
    if (row.uniform) continue;
    out << fmt(row.alpha) << ',' << to_string(row.kind) << ',' << fmt(row.r) << ','
        << fmt(round_pct(row.tm_pct()), "%.1f") << '\n';
  }
}

void write_realdata_csv(std::ostream& out, const RealDataReport& report) {
  out << "label,criterion,alpha,rmse_mean,rmse_sd,nu_raw_mean,nu_raw_sd,nu_mean,nu_sd,cr_mean,cr_sd,repetitions,"
         "failures\n";
  for (const auto& row : report.rows) {
    out << '"' << row.label << "\"," << to_string(row.kind) << ',' << fmt(row.alpha) << ',' << fmt(row.rmse.mean)
        << ',' << fmt(row.rmse.sd) << ',' << fmt(row.nu_raw.mean) << ',' << fmt(row.nu_raw.sd) << ','
        << fmt(row.nu.mean) << ',' << fmt(row.nu.sd) << ',' << fmt(row.cr.mean) << ',' << fmt(row.cr.sd) << ','
        << row.repetitions << ',' << row.failures << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace dpdsel
