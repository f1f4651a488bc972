#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ramp/common.hpp"
#include "ramp/distribution.hpp"
#include "ramp/model.hpp"
#include "ramp/suite.hpp"
#include "ramp/wavelet.hpp"

namespace ramp {

struct CompressedSample {
  Matrix X;
  Vector Y;
  Vector errors;
  double delta_prime = 0.5;
  DistributionSpec corruption;

  ProblemInstance instance(const Vector& beta_true) const;
};

// n = floor(delta_prime * p), X i.i.d. N(0, 1/n), Y = X beta + eps.
CompressedSample compress_and_corrupt(const Vector& beta, double delta_prime, const DistributionSpec& corruption,
                                      std::uint64_t seed);

struct ReconstructionReport {
  std::string estimator;
  std::optional<double> mape;  // over coordinates with beta_j != 0; unset when beta is all zero
  double mse = 0.0;
  std::optional<double> tp_rate;  // unset when beta is all zero
  double tn_rate = 1.0;           // 1 when beta has no zero coordinate
};

ReconstructionReport score(const Vector& beta_hat, const Vector& beta_true, const std::string& estimator = "");

// Mean squared error over the smallest-magnitude `fraction` of the true nonzeros.
double weak_coefficient_mse(const Vector& beta_hat, const Vector& beta_true, double fraction = 0.25);

struct ReconstructionConfig {
  WaveletBasis basis = WaveletBasis::la8();
  double delta_prime = 0.5;
  DistributionSpec corruption = DistributionSpec::student_t(3).with_target_sd(0.03);
  std::uint64_t seed = 0;
  SuiteConfig suite = SuiteConfig::reconstruction();
};

struct ReconstructedEstimate {
  EstimateOutput estimate;
  Vector signal_hat;  // back-transformed
  ReconstructionReport report;
  double weak_mse = 0.0;
};

struct ReconstructionOutcome {
  Vector coefficients;  // wavelet coefficients of the input signal
  int n = 0;
  int p = 0;
  std::vector<ReconstructedEstimate> estimates;
};

// dwt, then reconstruct_coefficients.
ReconstructionOutcome reconstruct_signal(const Vector& signal, const ReconstructionConfig& config);
// Starts from known wavelet coefficients (exact zeros stay exact).
ReconstructionOutcome reconstruct_coefficients(const Vector& coefficients, const ReconstructionConfig& config);

struct SyntheticSignal {
  Vector coefficients;
  Vector signal;
};

// Exactly sparse in `basis`: a few strong coarse-scale coefficients (|c| in [1,3]) and more weak
// fine-scale ones (|c| in [0.05,0.25]).
SyntheticSignal synthetic_test_signal(int length, const WaveletBasis& basis, std::uint64_t seed);

}  // namespace ramp
