#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ramp/distribution.hpp"
#include "ramp/pipeline.hpp"

namespace ramp {

enum class Estimator {
  kMaW1,    // model average, Stein-QP weights
  kMaW2,    // model average, asymptotic-variance weights
  kMaEq,    // model average, equal weights
  kCW1,     // composite, searched weights
  kCW2,     // composite, asymptotic-variance weights
  kCEq,     // composite, equal weights
  kLasso,
  kMedian,  // single quantile at 0.5
};

std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& name);
std::vector<Estimator> all_estimators();
bool is_model_average(Estimator e);
bool is_composite(Estimator e);

struct SuiteConfig {
  std::vector<double> taus{0.25, 0.5, 0.75};
  TuningConfig tuning = TuningConfig::simulation();
  RampConfig ramp;
  WeightSearchConfig search;
  PipelineOptions pipeline;
  InterceptInit init;
  std::vector<Estimator> estimators = all_estimators();
  // Error law for the variance-based weights; without it the densities come from a Gaussian KDE
  // of the initial-fit residuals.
  std::optional<DistributionSpec> error_law;

  static SuiteConfig simulation();
  static SuiteConfig reconstruction();  // data tuning range, tolerance 1e-8
};

struct EstimateOutput {
  Estimator estimator = Estimator::kLasso;
  bool ok = false;
  std::string error;
  Vector beta_hat;
  bool converged = false;
  int iterations = 0;  // max over components for model averages
  double alpha = 0.0;  // NaN for model averages (one alpha per component)
  std::optional<Vector> weights;
  double amse_hat = 0.0;
};

struct SuiteResult {
  std::vector<EstimateOutput> outputs;  // in the order of SuiteConfig::estimators
  std::vector<double> intercepts;
  std::vector<double> densities;  // f_eps at the intercepts, used by the variance-based weights
  std::optional<PipelineResult> model_average;
  std::optional<WeightSearchResult> search;
  double composite_alpha = 0.0;

  const EstimateOutput* find(Estimator e) const;
};

// Density of the error law at its own tau-quantiles.
std::vector<double> law_densities_at_quantiles(const DistributionSpec& law, const std::vector<double>& taus);

SuiteResult run_estimator_suite(const ProblemInstance& instance, const SuiteConfig& config);

}  // namespace ramp
