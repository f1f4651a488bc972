#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ramp/common.hpp"
#include "ramp/distribution.hpp"
#include "ramp/loss.hpp"
#include "ramp/solver.hpp"

namespace ramp {

enum class SigmaKind { kOracle, kStein, kTheoretical, kEmpirical };

struct SigmaMatrix {
  Matrix entries;
  SigmaKind kind = SigmaKind::kStein;

  int size() const { return static_cast<int>(entries.rows()); }
};

// n^{-1} sum_i G(z_i; b)^2
double empirical_state_evolution(const Vector& z, double b, const Loss& loss, double delta, double omega);

// Sample covariance (1/(p-1)) of two debiased vectors.
double cross_zeta(const Vector& beta_tilde_1, const Vector& beta_tilde_2);

// Estimators of zeta_{k1} zeta_{k2} Cov(Z_{k1}, Z_{k2}) fed to the Stein matrix.
enum class CrossZetaRule {
  kSampleCovariance,        // sample covariance of the debiased vectors for every entry
  kStateEvolutionDiagonal,  // diagonal n^{-1}||G_k||^2, off-diagonal sample covariance
  kScoreProduct,            // n^{-1} <G_{k1}, G_{k2}> for every entry
};

// scores may be empty unless the rule needs them.
Matrix cross_zeta_matrix(const std::vector<Vector>& beta_tildes, const std::vector<Vector>& scores,
                         CrossZetaRule rule);

SigmaMatrix stein_sigma_hat(const std::vector<Vector>& beta_tildes, const std::vector<double>& thetas,
                            const Matrix& cross_zetas);

// -zeta^2 + p^{-1} sum_j [(eta(bt_j) - bt_j)^2 + 2 zeta^2 1{|bt_j| >= theta}]
double composite_amse_hat(const Vector& beta_tilde, double theta, double zeta_emp_sq);

SigmaMatrix empirical_sigma_oracle(const std::vector<Vector>& beta_hats, const std::optional<Vector>& beta_true);

// Sample covariance matrix of the estimates themselves (dense regime).
SigmaMatrix dense_sigma_hat(const std::vector<Vector>& beta_hats);

struct StateEvolutionPoint {
  double zeta_sq = 0.0;
  double sigma_sq = 0.0;
  double b = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> zeta_sq_trace;
};

// How the Gaussian perturbation of the residual side is tied to zeta.
enum class SeCoupling {
  kAuto,     // kSparse when a coefficient law is given, kDense when omega >= 1, else kLiteral
  kLiteral,  // residual perturbation is zeta Z itself
  kDense,    // sigma^2 = zeta^2 / delta (identity denoiser)
  kSparse,   // sigma^2 = delta^{-1} E[(eta(B0 + zeta Z; alpha zeta) - B0)^2]
};

struct StateEvolutionOptions {
  std::size_t mc_samples = 100000;
  int max_iters = 200;
  double ftol = 1e-8;
  std::uint64_t seed = 0;
  SeCoupling coupling = SeCoupling::kAuto;
  std::optional<DistributionSpec> coefficient_law;  // B0
  double alpha = 1.5;
  BCalibrationRule b_rule = BCalibrationRule::kUnitSlope;
  BGrid b_grid;
};

// Stops once zeta^2 moves by at most ftol, or returns within ftol of its value two steps back
// (a 2-cycle of Monte Carlo size).
StateEvolutionPoint fixed_point_state_evolution(const Loss& loss, const DistributionSpec& eps_dist, double delta,
                                                double omega, const StateEvolutionOptions& options = {});

// One application of the zeta^2 map at a given zeta^2 (same Monte Carlo sample as the solver).
StateEvolutionPoint state_evolution_step(const Loss& loss, const DistributionSpec& eps_dist, double delta,
                                         double omega, double zeta_sq, const StateEvolutionOptions& options = {});

// E[G~^2] / (E[d G~])^2 under F_tilde, by Monte Carlo.
double huber_variance(const Loss& loss, double b, const DistributionSpec& f_tilde, std::size_t mc_samples = 100000,
                      std::uint64_t seed = 0);

}  // namespace ramp
