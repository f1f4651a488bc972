#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramp/amse.hpp"
#include "ramp/common.hpp"
#include "ramp/loss.hpp"
#include "ramp/model.hpp"
#include "ramp/solver.hpp"
#include "ramp/weights.hpp"

namespace ramp {

enum class CandidateMode { kGoldenSection, kGrid };

struct TuningConfig {
  std::optional<double> alpha_min;  // unset: alpha_min_bound(delta)
  double alpha_max = 2.3;
  double gs_tol = 1e-2;
  CandidateMode mode = CandidateMode::kGoldenSection;
  std::vector<double> grid;  // kGrid only

  // Fixed lower end 1.3, as used for the simulations.
  static TuningConfig simulation();
  double resolve_alpha_min(double delta) const;
  void validate(double delta) const;
};

// Root of (1 + a^2) Phi(-a) - a phi(a) = delta / 2 on [0, 10].
double alpha_min_bound(double delta);

struct AlphaProbe {
  double alpha = 0.0;
  double objective = 0.0;  // NaN when the run failed
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct AlphaSearchResult {
  double alpha = 0.0;
  double objective = 0.0;
  std::vector<AlphaProbe> probes;
};

// Probes objective(alpha) by golden section or on the grid; the probe with the smallest finite
// objective wins. The objective may throw ramp::Error (recorded as a failed probe).
using AlphaObjective = std::function<AlphaProbe(double)>;
AlphaSearchResult search_alpha(const AlphaObjective& objective, double lo, double hi, const TuningConfig& tuning);

// ceil(log((hi - lo) / tol) / log(golden ratio)) + 2
int golden_section_probe_bound(double lo, double hi, double tol);

struct TunedRun {
  double alpha = 0.0;
  RampResult run;
  std::vector<AlphaProbe> probes;
};

TunedRun tune_alpha(const ProblemInstance& instance, const Loss& loss, const TuningConfig& tuning,
                    const RampConfig& ramp_config);

enum class InitMethod { kLassoAmp, kSingleQuantile };

struct InterceptInit {
  InitMethod method = InitMethod::kLassoAmp;
  double tau = 0.5;  // kSingleQuantile
};

// Type-7 quantiles of the residuals, strictly increasing (k * 1e-12 jitter on ties, with warning).
std::vector<double> intercepts_from_residuals(const Vector& residuals, std::span<const double> taus);

struct InterceptEstimate {
  std::vector<double> intercepts;
  TunedRun init_run;
};

InterceptEstimate estimate_intercepts(const ProblemInstance& instance, std::span<const double> taus,
                                      const InterceptInit& init, const TuningConfig& tuning,
                                      const RampConfig& ramp_config);

Vector model_average(const std::vector<Vector>& beta_hats, const Vector& w);

struct ComponentResult {
  double tau = 0.0;
  double intercept = 0.0;
  bool ok = false;
  std::string error;
  TunedRun tuned;
};

struct PipelineResult {
  std::vector<ComponentResult> components;
  std::vector<double> intercepts;
  std::vector<double> alphas;  // NaN for failed components
  std::vector<int> used;       // indices of components entering Sigma and the average
  SigmaMatrix sigma_hat;       // over the used components
  WeightVector weights;        // full K-vector, zero on failed components
  Vector beta_ma;
  bool all_converged = false;
};

struct PipelineOptions {
  CrossZetaRule cross_zeta = CrossZetaRule::kScoreProduct;
  int threads = 1;
};

// Per-quantile tuned RAMP runs, the Stein matrix over them and the simplex-QP average.
PipelineResult k_parallel_ramp(const ProblemInstance& instance, std::span<const double> taus,
                               std::span<const double> intercepts, const TuningConfig& tuning,
                               const RampConfig& ramp_config, const PipelineOptions& options = {});

// Re-weights an existing pipeline result (weights indexed over all K components).
Vector reaverage(const PipelineResult& result, const Vector& w);

// Composite estimator at fixed weights with tuned alpha.
TunedRun composite_estimate(const ProblemInstance& instance, std::span<const double> taus,
                            std::span<const double> intercepts, const Vector& weights, const TuningConfig& tuning,
                            const RampConfig& ramp_config);

}  // namespace ramp
