#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramp/amse.hpp"
#include "ramp/common.hpp"
#include "ramp/model.hpp"
#include "ramp/solver.hpp"

namespace ramp {

enum class WeightRule {
  kMaClosed,        // unconstrained AMSE-optimal, may be negative
  kMaQp,            // simplex QP on the Stein matrix
  kMaOracle,        // simplex QP on the asymptotic variance matrix
  kMaBatesGranger,  // diagonal only
  kCSearch,         // composite weight search
  kCOracle,         // composite asymptotic variance
  kEqual,
};

std::string to_string(WeightRule rule);

struct WeightVector {
  Vector w;
  WeightRule rule = WeightRule::kEqual;
  double attained_value = 0.0;
  std::optional<Vector> raw;  // kCOracle: solution before renormalizing to the simplex
};

struct ClosedFormWeights {
  WeightVector weights;
  double lower_bound = 0.0;
};

WeightVector equal_weights(int k);

// Throws SingularMatrixError when the condition number exceeds 1e12.
ClosedFormWeights closed_form_ma_weights(const SigmaMatrix& sigma);

// min w'Mw subject to a'w = 1, w >= 0, by enumerating supports. Exact for K <= 15.
// M must be symmetric PSD. Returns nullopt if no support admits a feasible point.
std::optional<Vector> affine_simplex_qp(const Matrix& m, const Vector& a);

// Symmetrize and clip negative eigenvalues to zero (warns when clipping is needed).
Matrix project_psd(const Matrix& m);

WeightVector simplex_qp_weights(const SigmaMatrix& sigma);
WeightVector bates_granger_weights(const SigmaMatrix& sigma);

// A_{k1 k2} = min(tau) (1 - max(tau))
Matrix quantile_covariance(std::span<const double> taus);

WeightVector oracle_ma_weights(std::span<const double> taus, std::span<const double> densities);
WeightVector oracle_composite_weights(std::span<const double> taus, std::span<const double> densities);

struct WeightSearchConfig {
  int rounds = 5;
  int n_candidates = 4;
  double grid_step = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Points w + step (e_i - e_j), clipped to the simplex and deduplicated; w itself excluded.
std::vector<Vector> simplex_neighborhood(const Vector& center, double step);

struct WeightSearchProbe {
  int round = 0;
  Vector w;
  double amse_hat = 0.0;
  bool converged = false;
  bool failed = false;
};

struct WeightSearchResult {
  WeightVector weights;  // rule kCSearch, attained_value = estimated AMSE
  RampResult best_run;
  std::vector<WeightSearchProbe> probes;  // in evaluation order, w_init first
  int rounds_run = 0;
};

// ramp_config.alpha is used as is for every candidate.
WeightSearchResult composite_weight_search(const ProblemInstance& instance, std::span<const double> taus,
                                           std::span<const double> intercepts, const WeightSearchConfig& config,
                                           const RampConfig& ramp_config, const Vector& w_init);

}  // namespace ramp
