#include "config.hpp"

#include <fstream>
#include <set>

#include "dpdsel/error.hpp"

namespace dpdsel::cli {

using nlohmann::json;

namespace {

/// Typed view of one JSON object that remembers which keys were read.
class Node {
 public:
  Node(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_ && j_->contains(key); }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    try {
      return j_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(path(key) + ": wrong type (" + j_->at(key).dump() + ")");
    }
  }

  Node child(const std::string& key) {
    used_.insert(key);
    return Node(has(key) ? &j_->at(key) : nullptr, path(key));
  }

  const json* raw(const std::string& key) {
    used_.insert(key);
    return has(key) ? &j_->at(key) : nullptr;
  }

  void finish() const {
    if (!j_) return;
    for (const auto& [k, v] : j_->items())
      if (!used_.count(k)) throw ValidationError(path(k) + ": unknown field");
  }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

CriterionKind criterion_at(const json& j, const std::string& path, bool exact) {
  if (!j.is_string()) throw ValidationError(path + ": expected a criterion name");
  const auto k = parse_criterion(j.get<std::string>(), exact);
  if (!k) throw ValidationError(path + ": unknown criterion '" + j.get<std::string>() + "'");
  return *k;
}

std::vector<CriterionKind> criteria_list(const json* j, const std::string& path, bool exact,
                                         std::vector<CriterionKind> fallback) {
  if (!j) return fallback;
  if (!j->is_array()) throw ValidationError(path + ": expected a list of criterion names");
  std::vector<CriterionKind> out;
  for (std::size_t i = 0; i < j->size(); ++i)
    out.push_back(criterion_at((*j)[i], path + "[" + std::to_string(i) + "]", exact));
  return out;
}

Backend backend_from(const std::string& s, const std::string& path) {
  if (s == "serial") return Backend::serial;
  if (s == "openmp") return Backend::openmp;
  throw ValidationError(path + ": expected 'serial' or 'openmp', got '" + s + "'");
}

SolverConfig parse_solver(Node n) {
  SolverConfig s;
  s.tol_obj = n.get("tol_obj", s.tol_obj);
  s.tol_kkt = n.get("tol_kkt", s.tol_kkt);
  s.max_iter = n.get("max_iter", s.max_iter);
  s.backend = backend_from(n.get<std::string>("backend", "openmp"), n.path("backend"));
  n.finish();
  return s;
}

CriteriaConfig parse_criteria(Node n) {
  CriteriaConfig c;
  c.gamma = n.get("gamma", c.gamma);
  c.zeta = n.get("zeta", c.zeta);
  c.use_exact_gedbbc = n.get("use_exact_gedbbc", c.use_exact_gedbbc);
  n.finish();
  return c;
}

}  // namespace

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "': " + e.what());
  }
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + o + "': expected key=value");
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    std::string ptr;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      ptr += "/" + key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    try {
      config[json::json_pointer(ptr)] = value;
    } catch (const json::exception& e) {
      throw ValidationError("override '" + key + "': " + e.what());
    }
  }
}

RunConfig parse_run_config(const json& config, const std::string& command) {
  RunConfig rc;
  Node root(&config, "");
  const auto seed = root.get<long long>("seed", 1);
  if (seed < 0) throw ValidationError("seed: must be >= 0");
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.workers = root.get("workers", 1);
  if (rc.workers < 1) throw ValidationError("workers: must be >= 1");

  SolverConfig solver = parse_solver(root.child("solver"));
  checked("solver", [&] { solver.validate(); });
  CriteriaConfig crit = parse_criteria(root.child("criteria"));
  checked("criteria", [&] { crit.validate(); });

  {
    Node s = root.child("selection");
    SelectionConfig& sc = rc.selection;
    sc.solver = solver;
    sc.criteria = crit;
    sc.max_model_size = s.get<Index>("max_model_size", sc.max_model_size);
    sc.expected_s = s.get<Index>("expected_s", sc.expected_s);
    sc.lambda_ref = s.get("lambda_ref", sc.lambda_ref);
    sc.lambda_ref_k = s.get("lambda_ref_k", sc.lambda_ref_k);
    sc.q = s.get("q", sc.q);
    sc.scad_a = s.get("scad_a", sc.scad_a);
    const auto init = s.get<std::string>("initial", "bhhj_lasso");
    const auto ie = parse_initial_estimator(init);
    if (!ie) throw ValidationError(s.path("initial") + ": unknown initial estimator '" + init + "'");
    sc.initial = *ie;
    sc.ridge_lambda = s.get("ridge_lambda", sc.ridge_lambda);
    if (const json* c = s.raw("criterion")) rc.criterion = criterion_at(*c, s.path("criterion"), crit.use_exact_gedbbc);
    s.finish();
    checked("selection", [&] { sc.validate(); });
  }

  {
    Node d = root.child("data");
    rc.data.csv = d.get<std::string>("csv", "");
    rc.data.response = d.get<std::string>("response", rc.data.response);
    rc.data.center_response = d.get("center_response", rc.data.center_response);
    rc.data.standardize = d.get("standardize", rc.data.standardize);
    d.finish();
  }
  {
    Node l = root.child("loss");
    rc.loss.alpha = l.get("alpha", rc.loss.alpha);
    rc.loss.sigma2 = l.get("sigma2", rc.loss.sigma2);
    l.finish();
    checked("loss", [&] { rc.loss.validate(); });
  }
  {
    Node w = root.child("weights");
    const auto kind = w.get<std::string>("kind", "scad_q");
    if (kind == "uniform") rc.weights = WeightKind::uniform;
    else if (kind == "scad_q") rc.weights = WeightKind::scad_q;
    else throw ValidationError(w.path("kind") + ": expected 'uniform' or 'scad_q', got '" + kind + "'");
    w.finish();
  }
  {
    if (root.has("lambda")) {
      rc.lambda = root.get("lambda", 0.0);
      if (!(*rc.lambda >= 0.0)) throw ValidationError("lambda: must be >= 0");
    } else {
      root.get("lambda", 0.0);
    }
    Node g = root.child("grid");
    rc.lambdas = g.get<std::vector<double>>("lambdas", {});
    rc.grid_length = g.get<Index>("length", rc.grid_length);
    g.finish();
    if (rc.grid_length < 2) throw ValidationError("grid.length: must be >= 2");
    for (std::size_t i = 0; i < rc.lambdas.size(); ++i) {
      if (!(rc.lambdas[i] > 0.0)) throw ValidationError("grid.lambdas[" + std::to_string(i) + "]: must be > 0");
      if (i > 0 && !(rc.lambdas[i] < rc.lambdas[i - 1]))
        throw ValidationError("grid.lambdas[" + std::to_string(i) + "]: grid must be strictly decreasing");
    }
  }

  {
    Node s = root.child("scenario");
    SimScenario& sc = rc.scenario;
    sc.n = s.get<Index>("n", sc.n);
    sc.p = s.get<Index>("p", sc.p);
    sc.s = s.get<Index>("s", sc.s);
    const auto beta = s.get<std::vector<double>>("beta_star", {});
    sc.beta_star = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Index>(beta.size()));
    sc.sigma2 = s.get("sigma2", sc.sigma2);
    sc.contamination_rates = s.get("contamination_rates", sc.contamination_rates);
    sc.outlier_multiplier = s.get("outlier_multiplier", sc.outlier_multiplier);
    sc.alphas = s.get("alphas", sc.alphas);
    sc.criteria = criteria_list(s.raw("criteria"), s.path("criteria"), crit.use_exact_gedbbc, sc.criteria);
    sc.uniform_baselines = s.get("uniform_baselines", sc.uniform_baselines);
    sc.trials = s.get("trials", sc.trials);
    const auto mode = s.get<std::string>("sigma2_mode", "true");
    if (mode == "true") sc.sigma2_mode = Sigma2Mode::true_value;
    else if (mode == "estimated") sc.sigma2_mode = Sigma2Mode::estimated;
    else throw ValidationError(s.path("sigma2_mode") + ": expected 'true' or 'estimated', got '" + mode + "'");
    sc.grid_length = s.get<Index>("grid_length", sc.grid_length);
    sc.mixed_as_under = s.get("mixed_as_under", sc.mixed_as_under);
    s.finish();
    sc.seed = rc.seed;
    sc.selection = rc.selection;
    if (command == "simulate") checked("scenario", [&] { sc.validate(); });
  }

  {
    Node r = root.child("realdata");
    RealDataConfig& rd = rc.realdata;
    rd.response = r.get<std::string>("response", rd.response);
    rd.exclude = r.get("exclude", rd.exclude);
    rd.interactions = r.get("interactions", rd.interactions);
    rd.repetitions = r.get("repetitions", rd.repetitions);
    rd.train_fraction = r.get("train_fraction", rd.train_fraction);
    rd.k = r.get<Index>("k", rd.k);
    rd.m = r.get("m", rd.m);
    rd.alphas = r.get("alphas", rd.alphas);
    rd.criteria = criteria_list(r.raw("criteria"), r.path("criteria"), crit.use_exact_gedbbc, rd.criteria);
    rd.grid_length = r.get<Index>("grid_length", rd.grid_length);
    rd.sigma2_lambda = r.get("sigma2_lambda", rd.sigma2_lambda);
    rd.reestimate_sigma2 = r.get("reestimate_sigma2", rd.reestimate_sigma2);
    r.finish();
    rd.seed = rc.seed;
    rd.selection = rc.selection;
    if (command == "analyze") checked("realdata", [&] { rd.validate(); });
  }
  root.finish();

  if (command == "fit" && !rc.lambda) throw ValidationError("lambda: required for fit");
  if ((command == "fit" || command == "path" || command == "select" || command == "analyze") && rc.data.csv.empty())
    throw ValidationError("data.csv: required for " + command);
  return rc;
}

}  // namespace dpdsel::cli
