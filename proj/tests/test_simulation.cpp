#include <doctest.h>

#include "ramp/io.hpp"
#include "ramp/simulation.hpp"

using namespace ramp;

namespace {

SimulationConfig small() {
  SimulationConfig c;
  c.n = 100;
  c.p = 200;
  c.s = 3;
  c.replicates = 3;
  c.seed = 5;
  c.suite.estimators = {Estimator::kMaW1, Estimator::kMaEq, Estimator::kCEq, Estimator::kLasso, Estimator::kMedian};
  return c;
}

}  // namespace

TEST_CASE("table tags") {
  const auto a = SimulationConfig::from_tag("table1-t3-s5");
  CHECK(a.n == 250);
  CHECK(a.p == 500);
  CHECK(a.s == 5);
  CHECK(std::holds_alternative<StudentT>(a.errors.kind));
  CHECK(a.suite.estimators == std::vector<Estimator>{Estimator::kMaW1, Estimator::kMaW2, Estimator::kMaEq, Estimator::kLasso});

  const auto b = SimulationConfig::from_tag("table4-mixture-s10-gauss-sx0.5");
  CHECK(b.sigma_x == 0.5);
  CHECK(std::holds_alternative<Gaussian>(b.coefficients.kind));
  CHECK(std::holds_alternative<GaussianMixture>(b.errors.kind));
  CHECK(b.suite.estimators == std::vector<Estimator>{Estimator::kMaW1, Estimator::kMedian});
  CHECK(SimulationConfig::from_tag("table2-normal-s5").suite.estimators == all_estimators());

  CHECK(table_number("table3-t3-s5") == 3);
  CHECK(table_number("") == 0);
  CHECK_THROWS_AS(SimulationConfig::from_tag("table6-t3-s5"), Error);
  CHECK_THROWS_AS(SimulationConfig::from_tag("table1-cauchy-s5"), Error);
}

TEST_CASE("score_estimate splits the error by support") {
  EstimateOutput e;
  e.ok = true;
  e.converged = true;
  e.beta_hat = (Vector(4) << 1.5, 0.0, 0.5, 0.0).finished();
  const Vector truth = (Vector(4) << 1.0, 0.0, 0.0, -1.0).finished();
  const EstimatorRecord r = score_estimate(e, truth);
  CHECK(r.mse_nonzero == doctest::Approx((0.25 + 1.0) / 2));
  CHECK(r.mse_zero == doctest::Approx(0.25 / 2));
  CHECK(r.mse_full == doctest::Approx(1.5 / 4));
  CHECK(r.tp == 0.5);
  CHECK(r.tn == 0.5);
}

TEST_CASE("simulation is deterministic and independent of the worker count") {
  SimulationConfig c = small();
  const SimulationResult one = run_simulation(c);
  c.threads = 3;
  const SimulationResult three = run_simulation(c);
  REQUIRE(one.replicates.size() == 3);
  for (int r = 0; r < 3; ++r) {
    const auto& a = one.replicates[r];
    const auto& b = three.replicates[r];
    CHECK(a.seed == b.seed);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].ok);
      CHECK(a.records[k].mse_full == b.records[k].mse_full);
    }
  }
  CHECK(summary_table(one).rows == summary_table(three).rows);
  CHECK(one.summary.size() == c.suite.estimators.size());
  for (const auto& s : one.summary) {
    CHECK(s.n_ok == 3);
    CHECK(s.mse_full >= 0.0);
    CHECK(s.tp >= 0.0);
    CHECK(s.tp <= 1.0);
  }
  // table 1 layout: parts by the model averages and the Lasso that were run
  const CsvTable t1 = simulation_table(one, 1);
  CHECK(t1.rows.size() == 3);
  CHECK(t1.header == std::vector<std::string>{"part", "ma_w1", "ma_eq", "lasso"});
}
