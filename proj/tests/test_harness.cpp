#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "dpdsel/csv.hpp"
#include "dpdsel/error.hpp"
#include "dpdsel/realdata.hpp"
#include "dpdsel/rng.hpp"
#include "dpdsel/simulation.hpp"

using namespace dpdsel;
using doctest::Approx;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SimScenario tiny(int trials = 2) {
  SimScenario s;
  s.n = 60;
  s.p = 12;
  s.s = 3;
  s.trials = trials;
  s.contamination_rates = {0.0, 0.1};
  s.alphas = {0.0, 0.1};
  s.grid_length = 15;
  s.seed = 9;
  return s;
}

void check_rows_sum(const RateTable& t) {
  for (const auto& row : t.rows) {
    CHECK(row.scored() + row.failed == t.trials_completed);
    if (row.scored() > 0) CHECK(row.um_pct() + row.tm_pct() + row.om_pct() == Approx(100.0).epsilon(1e-12));
  }
}

Table synthetic_table(Index n, Index d, std::uint64_t seed) {
  Rng g = substream(seed, {42});
  Table t;
  for (Index j = 0; j < d; ++j) t.columns.push_back("x" + std::to_string(j));
  t.columns.push_back("y");
  t.values.resize(n, d + 1);
  t.values.leftCols(d) = standard_normal(g, n, d);
  const MatrixXd e = standard_normal(g, n, 1);
  t.values.col(d) = 2.0 * t.values.col(0) - 1.5 * t.values.col(1) + t.values.col(0).cwiseProduct(t.values.col(2)) +
                    0.5 * e.col(0);
  return t;
}

}  // namespace

TEST_CASE("noise has the configured variance") {
  SimScenario s;
  s.n = 5000;
  s.p = 10;
  s.s = 3;
  s.sigma2 = 2.0;
  const auto inst = generate_instance(s, 0);
  const VectorXd e = inst.data.y - inst.data.X * s.resolved_beta_star();
  const double var = (e.array() - e.mean()).square().sum() / (s.n - 1);
  CHECK(var == Approx(2.0).epsilon(0.05));
  CHECK(std::abs(inst.data.y.mean()) < 1e-12);
  CHECK(inst.truth == std::vector<Index>{0, 1, 2});
}

TEST_CASE("s=0 gives pure noise; instances are deterministic") {
  SimScenario s = tiny();
  s.s = 0;
  const auto a = generate_instance(s, 3);
  CHECK(a.truth.empty());
  const auto b = generate_instance(s, 3);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  const auto c = generate_instance(s, 4);
  CHECK(a.data.X == c.data.X);
  CHECK(a.data.y != c.data.y);
}

TEST_CASE("contaminate") {
  const VectorXd y = VectorXd::LinSpaced(100, -3, 3);
  Rng g0 = substream(1, {2});
  const auto c0 = contaminate(y, 0.0, 10.0, g0);
  CHECK(c0.y == y);
  CHECK(c0.mask.empty());
  Rng g1 = substream(1, {2});
  const auto c1 = contaminate(y, 1.0, 10.0, g1);
  CHECK(c1.y == 10.0 * y);
  CHECK(c1.mask.size() == 100);

  const VectorXd big = VectorXd::Ones(10000);
  Rng g = substream(5, {stream::contamination});
  const auto c = contaminate(big, 0.05, 10.0, g);
  const double sd = std::sqrt(10000 * 0.05 * 0.95);
  CHECK(std::abs(static_cast<double>(c.mask.size()) - 500.0) <= 3.0 * sd);

  Rng gx = substream(5, {7}), gy = substream(5, {7});
  const auto small = contaminate(big, 0.02, 10.0, gx);
  const auto large = contaminate(big, 0.1, 10.0, gy);
  CHECK(std::includes(large.mask.begin(), large.mask.end(), small.mask.begin(), small.mask.end()));
  Rng bad = substream(0, {0});
  CHECK_THROWS_AS(contaminate(y, 1.5, 10.0, bad), ValidationError);
}

TEST_CASE("one trial puts the whole row in a single class") {
  const auto t = run_scenario(tiny(1));
  CHECK(t.complete);
  for (const auto& row : t.rows) {
    if (row.failed) continue;
    const int hundreds = (row.um_pct() == 100.0) + (row.tm_pct() == 100.0) + (row.om_pct() == 100.0);
    CHECK(hundreds == 1);
  }
}

TEST_CASE("rate tables: row sums, labels and determinism") {
  const auto a = run_scenario(tiny(4));
  check_rows_sum(a);
  // 2 alphas x 3 criteria + 2 baselines, for each of 2 rates
  CHECK(a.rows.size() == 16);
  CHECK_NOTHROW(a.find("E-DBBC (0.1)", 0.1));
  CHECK_NOTHROW(a.find("unif-BIC", 0.0));
  CHECK_NOTHROW(a.find("unif-EBIC", 0.1));
  CHECK_THROWS(a.find("nope", 0.0));
  RunControl two;
  two.workers = 2;
  const auto b = run_scenario(tiny(4), two);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].label == b.rows[k].label);
    CHECK(a.rows[k].um == b.rows[k].um);
    CHECK(a.rows[k].tm == b.rows[k].tm);
    CHECK(a.rows[k].om == b.rows[k].om);
    CHECK(a.rows[k].failed == b.rows[k].failed);
  }
  CHECK(a.worst_kkt_over_n == b.worst_kkt_over_n);
}

TEST_CASE("estimated sigma2 mode runs and stays near the truth") {
  SimScenario s = tiny(2);
  s.n = 200;
  s.sigma2_mode = Sigma2Mode::estimated;
  const auto inst = generate_instance(s, 0);
  const double s2 = estimate_sigma2(inst.data, std::sqrt(2 * std::log(12.0) / 200), {});
  CHECK(s2 == Approx(1.0).epsilon(0.25));
  check_rows_sum(run_scenario(s));
}

TEST_CASE("a stop request yields an incomplete table") {
  std::atomic<bool> stop{true};
  RunControl c;
  c.stop = &stop;
  const auto t = run_scenario(tiny(3), c);
  CHECK_FALSE(t.complete);
  CHECK(t.trials_completed == 0);
}

TEST_CASE("scenario validation") {
  SimScenario s = tiny();
  s.s = 20;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = tiny();
  s.contamination_rates = {1.2};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = tiny();
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("expand_interactions shapes") {
  Rng g = substream(3, {1});
  CHECK(expand_interactions(standard_normal(g, 30, 13)).cols() == 91);
  CHECK(expand_interactions(standard_normal(g, 30, 1)).cols() == 1);
  CHECK(interaction_names({"a", "b", "c"}) == std::vector<std::string>{"a", "b", "c", "a:b", "a:c", "b:c"});
}

TEST_CASE("expand_interactions on a hand-computed 4x3 matrix") {
  MatrixXd raw(4, 3);
  raw << 1, 2, 0,
         2, 4, 1,
         3, 6, 1,
         4, 0, 2;
  // column standardisation with the sample SD (n - 1)
  auto stdz = [](const VectorXd& v) {
    const VectorXd c = v.array() - v.mean();
    return VectorXd(c / std::sqrt(c.squaredNorm() / (v.size() - 1)));
  };
  MatrixXd expect(4, 6);
  for (int j = 0; j < 3; ++j) expect.col(j) = stdz(raw.col(j));
  expect.col(3) = stdz(expect.col(0).cwiseProduct(expect.col(1)));
  expect.col(4) = stdz(expect.col(0).cwiseProduct(expect.col(2)));
  expect.col(5) = stdz(expect.col(1).cwiseProduct(expect.col(2)));
  // first column by hand: mean 2.5, SD sqrt(5/3)
  CHECK(expect(0, 0) == Approx(-1.5 / std::sqrt(5.0 / 3.0)));
  const MatrixXd got = expand_interactions(raw);
  REQUIRE(got.cols() == 6);
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero-variance columns are rejected with their index") {
  MatrixXd raw(5, 3);
  raw << 1, 7, 2, 2, 7, 3, 3, 7, 1, 4, 7, 5, 5, 7, 4;
  try {
    expand_interactions(raw);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
}

TEST_CASE("real-data pipeline without effective contamination has perfect concordance") {
  const Table t = synthetic_table(80, 4, 1);
  for (auto [k, m] : {std::pair<Index, double>{0, 10.0}, std::pair<Index, double>{1, 1.0}}) {
    RealDataConfig cfg;
    cfg.response = "y";
    cfg.repetitions = 3;
    cfg.k = k;
    cfg.m = m;
    cfg.grid_length = 15;
    const auto rep = run_realdata(t, cfg);
    CHECK(rep.complete);
    CHECK(rep.p == 10);
    CHECK(rep.n_train == 64);
    CHECK(rep.n_test == 16);
    for (const auto& row : rep.rows) {
      CHECK(row.cr.mean == 1.0);
      CHECK(row.nu.mean == row.nu_raw.mean);
      CHECK(row.nu.mean <= 10.0);
      CHECK(row.rmse.mean > 0.0);
    }
  }
}

TEST_CASE("real-data pipeline with contamination keeps its invariants") {
  const Table t = synthetic_table(80, 4, 2);
  RealDataConfig cfg;
  cfg.response = "y";
  cfg.repetitions = 4;
  cfg.k = 3;
  cfg.m = 50;
  cfg.grid_length = 15;
  const auto rep = run_realdata(t, cfg);
  CHECK(rep.rows.size() == 6);
  for (const auto& row : rep.rows) {
    CHECK(row.cr.mean >= 0.0);
    CHECK(row.cr.mean <= 1.0);
    CHECK(row.repetitions + row.failures == 4);
  }
  CHECK_NOTHROW(rep.find("GE-DBBC (0.1)"));
  const auto again = run_realdata(t, cfg);
  for (std::size_t k = 0; k < rep.rows.size(); ++k) CHECK(rep.rows[k].rmse.mean == again.rows[k].rmse.mean);
  RealDataConfig missing = cfg;
  missing.response = "MEDV";
  CHECK_THROWS_AS(run_realdata(t, missing), ValidationError);
}

TEST_CASE("mean_sd uses the sample SD") {
  const auto m = mean_sd({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.sd == Approx(std::sqrt(5.0 / 3.0)));
}

TEST_CASE("csv parsing and error coordinates") {
  std::istringstream ok("\"a\",b,c\n1,2,3\n4.5,-1e3,0\n");
  const Table t = read_csv(ok);
  CHECK(t.columns == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.values(1, 1) == -1000.0);
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("z"), ValidationError);

  std::istringstream bad("a,b\n1,2\n3,oops\n");
  try {
    read_csv(bad, "f.csv");
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), ValidationError);
  CHECK_THROWS_AS(read_csv(std::filesystem::path("/nonexistent/x.csv")), IoError);
}
