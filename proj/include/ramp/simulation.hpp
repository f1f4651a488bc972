#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramp/distribution.hpp"
#include "ramp/suite.hpp"

namespace ramp {

struct SimulationConfig {
  int n = 250;
  int p = 500;
  int s = 5;
  double sigma_x = 0.0;
  DistributionSpec coefficients = DistributionSpec::dirac_pm1();
  DistributionSpec errors = DistributionSpec::student_t(3).with_target_sd(0.2);
  int replicates = 50;
  std::uint64_t seed = 1;
  int threads = 1;
  SuiteConfig suite = SuiteConfig::simulation();
  bool oracle_densities = true;  // variance-based weights from the true error law
  std::string table_tag;

  void validate() const;
  // "table<k>-<normal|t3|mixture>-s<int>[-gauss][-sx<float>]", e.g. "table1-t3-s5".
  static SimulationConfig from_tag(const std::string& tag);
};

// Which table layout a tag asks for (1..5), 0 if none.
int table_number(const std::string& tag);

struct EstimatorRecord {
  Estimator estimator = Estimator::kLasso;
  bool ok = false;
  std::string error;
  double mse_nonzero = 0.0;  // mean over true nonzero coordinates
  double mse_zero = 0.0;     // mean over true zero coordinates
  double mse_full = 0.0;
  double tp = 0.0;
  double tn = 0.0;
  bool converged = false;
  int iterations = 0;
  double alpha = 0.0;
};

struct ReplicateRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorRecord> records;
  std::vector<double> intercepts;
  Vector ma_weights;  // Stein-QP weights, empty if not run
  Vector c_weights;   // searched composite weights, empty if not run
  double seconds = 0.0;

  const EstimatorRecord* find(Estimator e) const;
};

struct EstimatorSummary {
  Estimator estimator = Estimator::kLasso;
  int n_ok = 0;
  double mse_nonzero = 0.0;
  double mse_zero = 0.0;
  double mse_full = 0.0;
  double mse_full_sd = 0.0;
  double tp = 0.0;
  double tn = 0.0;
  double convergence_pct = 0.0;  // over all replicates (failures count as not converged)
};

struct SimulationResult {
  SimulationConfig config;
  std::vector<ReplicateRecord> replicates;
  std::vector<EstimatorSummary> summary;
  double seconds = 0.0;

  const EstimatorSummary* find(Estimator e) const;
};

EstimatorRecord score_estimate(const EstimateOutput& est, const Vector& beta_true);

ReplicateRecord run_replicate(const SimulationConfig& config, int replicate);

// Replicates run on config.threads workers; results do not depend on the worker count.
SimulationResult run_simulation(const SimulationConfig& config);

std::vector<EstimatorSummary> summarize(const std::vector<ReplicateRecord>& reps, const std::vector<Estimator>& order);

}  // namespace ramp
