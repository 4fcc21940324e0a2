#include <atomic>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "dpdsel/csv.hpp"
#include "dpdsel/error.hpp"
#include "dpdsel/serialize.hpp"

namespace fs = std::filesystem;
using namespace dpdsel;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  bool quiet = false;
};

void report_error(ErrorCode code, const std::string& message) {
  std::cerr << json{{"status", "error"}, {"code", static_cast<int>(code)}, {"kind", std::string(to_string(code))},
                    {"message", message}}
                   .dump()
            << '\n';
}

Dataset load_dataset(const cli::RunConfig& rc, std::vector<std::string>& names) {
  const Table t = read_csv(fs::path(rc.data.csv));
  const Index resp = t.column(rc.data.response);
  Dataset d;
  d.y = t.values.col(resp);
  d.X.resize(t.values.rows(), t.values.cols() - 1);
  Index c = 0;
  for (Index j = 0; j < t.values.cols(); ++j) {
    if (j == resp) continue;
    d.X.col(c++) = t.values.col(j);
    names.push_back(t.columns[static_cast<std::size_t>(j)]);
  }
  if (d.X.cols() == 0) throw ValidationError("data.csv: no predictor columns");
  if (rc.data.center_response) d.y.array() -= d.y.mean();
  if (rc.data.standardize) {
    const double n = static_cast<double>(d.X.rows());
    for (Index j = 0; j < d.X.cols(); ++j) {
      d.X.col(j).array() -= d.X.col(j).mean();
      const double sd = std::sqrt(d.X.col(j).squaredNorm() / (n - 1.0));
      if (!(sd > 0.0)) throw ValidationError("data.csv: column '" + names[static_cast<std::size_t>(j)] + "' has zero variance");
      d.X.col(j) /= sd;
    }
  }
  d.validate();
  return d;
}

std::vector<double> resolve_grid(const cli::RunConfig& rc, Index n, Index p) {
  if (!rc.lambdas.empty()) return rc.lambdas;
  return default_lambda_grid(n, p, rc.selection.resolved_max_model_size(n), rc.grid_length);
}

WeightVector resolve_weights(const cli::RunConfig& rc, const Dataset& d, WeightScheme& scheme) {
  scheme = make_scheme(rc.weights, d.n(), d.p(), rc.selection, rc.loss.sigma2);
  if (rc.weights == WeightKind::uniform) return uniform_weights(d.p());
  return build_weights(initial_estimate(d, rc.loss, scheme.lambda_ref, rc.selection), scheme);
}

class Outputs {
 public:
  Outputs(fs::path dir, std::string command, const json& config) : dir_(std::move(dir)), command_(std::move(command)), config_(config) {}

  void add(const std::string& name, const std::string& text) { files_.emplace_back(name, text); }

  void flush(bool complete, const std::string& note = {}) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create '" + dir_.string() + "': " + ec.message());
    std::ostringstream manifest;
    manifest << "command=" << command_ << '\n' << "complete=" << (complete ? "true" : "false") << '\n';
    if (!note.empty()) manifest << "note=" << note << '\n';
    for (const auto& [name, text] : files_) {
      write_file_atomic(dir_ / name, text);
      manifest << "file=" << name << '\n';
    }
    write_file_atomic(dir_ / "config.json", config_.dump(2) + "\n");
    manifest << "file=config.json\n";
    write_file_atomic(dir_ / "MANIFEST", manifest.str());
  }

 private:
  fs::path dir_;
  std::string command_;
  json config_;
  std::vector<std::pair<std::string, std::string>> files_;
};

RunControl make_control(const cli::RunConfig& rc, bool quiet) {
  RunControl ctl;
  ctl.workers = rc.workers;
  ctl.stop = &g_stop;
  if (!quiet)
    ctl.progress = [](int done, int total) { std::cerr << "\r" << done << "/" << total << std::flush; if (done == total) std::cerr << '\n'; };
  return ctl;
}

int run(const std::string& command, const Options& opt) {
  json config = opt.config_path.empty() ? json::object() : cli::load_config(opt.config_path);
  cli::apply_overrides(config, opt.overrides);
  const cli::RunConfig rc = cli::parse_run_config(config, command);
  Outputs out(opt.out_dir, command, config);

  if (command == "fit" || command == "path" || command == "select") {
    std::vector<std::string> names;
    const Dataset d = load_dataset(rc, names);
    WeightScheme scheme;
    if (command == "select") {
      scheme = make_scheme(rc.weights, d.n(), d.p(), rc.selection, rc.loss.sigma2);
      const std::vector<double> grid = resolve_grid(rc, d.n(), d.p());
      const SelectionResult res = select(d, rc.loss, scheme, grid, rc.selection, rc.criterion);
      out.add("selection.json", json(res).dump(2) + "\n");
      out.flush(true, res.success ? "" : "no valid path point");
      if (!res.success) {
        report_error(ErrorCode::numerical, "selection failed: every path point was flagged");
        return static_cast<int>(ErrorCode::numerical);
      }
      return 0;
    }
    const WeightVector w = resolve_weights(rc, d, scheme);
    if (command == "fit") {
      const FitResult fit = fit_one(d, rc.loss, w, *rc.lambda, Eigen::VectorXd::Zero(d.p()), rc.selection.solver);
      out.add("fit.json", json(fit).dump(2) + "\n");
      out.flush(true, fit.converged ? "" : std::string("not converged: ") + std::string(to_string(fit.status)));
      if (!fit.converged) {
        report_error(ErrorCode::numerical, std::string("fit did not converge: ") + std::string(to_string(fit.status)));
        return static_cast<int>(ErrorCode::numerical);
      }
      return 0;
    }
    PathOptions po;
    po.solver = rc.selection.solver;
    const PathFit path = fit_path(d, rc.loss, w, resolve_grid(rc, d.n(), d.p()), po);
    out.add("path.json", json(path).dump(2) + "\n");
    bool all = true;
    for (const auto& f : path.points) all = all && f.converged;
    out.flush(true, all ? "" : "some path points did not converge");
    return 0;
  }

  if (command == "simulate") {
    std::signal(SIGINT, on_interrupt);
    const RateTable table = run_scenario(rc.scenario, make_control(rc, opt.quiet));
    std::ostringstream rates, plot;
    write_rate_csv(rates, table);
    write_plot_csv(plot, table);
    out.add("rates.csv", rates.str());
    out.add("rates.json", json(table).dump(2) + "\n");
    out.add("plot.csv", plot.str());
    out.flush(table.complete, table.complete ? "" : "interrupted after " + std::to_string(table.trials_completed) + " trials");
    return table.complete ? 0 : static_cast<int>(ErrorCode::numerical);
  }

  if (command == "analyze") {
    std::signal(SIGINT, on_interrupt);
    const Table t = read_csv(fs::path(rc.data.csv));
    const RealDataReport rep = run_realdata(t, rc.realdata, make_control(rc, opt.quiet));
    std::ostringstream csv;
    write_realdata_csv(csv, rep);
    out.add("realdata.csv", csv.str());
    out.add("realdata.json", json(rep).dump(2) + "\n");
    out.flush(rep.complete,
              rep.complete ? "" : "interrupted after " + std::to_string(rep.repetitions_completed) + " repetitions");
    return rep.complete ? 0 : static_cast<int>(ErrorCode::numerical);
  }
  throw ValidationError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust sparse regression with divergence-based selection criteria"};
  app.require_subcommand(1);
  Options opt;
  long long seed = -1;
  int workers = 0;
  std::string data;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fit", "Fit one penalized estimate at config 'lambda'"},
      {"path", "Fit the regularization path"},
      {"select", "Select lambda on the path with one criterion"},
      {"simulate", "Run a Monte-Carlo selection-rate scenario"},
      {"analyze", "Run the real-data split / contamination pipeline"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config_path, "JSON config file");
    sub->add_option("--set", opt.overrides, "Override a config field: key.path=value")->take_all();
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--workers", workers, "Worker threads for trials");
    sub->add_option("--data", data, "Dataset CSV (data.csv)");
    sub->add_option("-o,--out", opt.out_dir, "Output directory");
    sub->add_flag("-q,--quiet", opt.quiet, "No progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorCode::validation);
  }
  if (seed >= 0) opt.overrides.push_back("seed=" + std::to_string(seed));
  if (workers > 0) opt.overrides.push_back("workers=" + std::to_string(workers));
  if (!data.empty()) opt.overrides.push_back("data.csv=" + json(data).dump());

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const Error& e) {
    report_error(e.code(), e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    report_error(ErrorCode::numerical, e.what());
    return static_cast<int>(ErrorCode::numerical);
  }
}
