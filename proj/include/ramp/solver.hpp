#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ramp/common.hpp"
#include "ramp/distribution.hpp"
#include "ramp/loss.hpp"
#include "ramp/model.hpp"

namespace ramp {

// How the assumed sparsity s (hence omega = s/p and the score rescaling n/s) is chosen.
enum class SparsityMode {
  kFromInstance,  // instance s_hint if present, else the current support size
  kFixed,         // RampConfig::sparsity
  // ceil(support_multiplier * current support size), clipped to [1, n/2]. With s above the
  // support size the flat-band feedback nnz/s is below one and the iteration contracts; the fixed
  // point is then l1 with a check loss smoothed over a band of width (1 - nnz/s) * b.
  kSupport,
};

// Equation that fixes b for quantile losses.
enum class BCalibrationRule {
  // s/n = b * sum_l [h(l-1) f(L_l) - h(l) f(R_l)] + sum_l [F(R_l) - F(L_l)], with the empirical
  // CDF and a Gaussian KDE, solved on the b grid.
  kScoreEquation,
  // Average slope of G equals one on the sample itself: exactly s residuals lie in flat bands.
  // b is the midpoint between the scales at which the s-th and (s+1)-th residual enter.
  kUnitSlope,
  // As kUnitSlope with the flat-band probability taken from the kernel-smoothed CDF.
  kUnitSlopeSmoothed,
};

struct BGrid {
  double max_multiplier = 10.0;  // grid spans (0, max_multiplier * sd(z)]
  int n_points = 400;
};

struct RampConfig {
  double alpha = 1.5;
  int max_iters = 50;
  double tol = 1e-6;
  SparsityMode sparsity_mode = SparsityMode::kSupport;
  int sparsity = 0;  // used by kFixed
  double support_multiplier = 4.0;  // kSupport only
  bool monotone_sparsity = true;    // kSupport: s never decreases across iterations
  BGrid b_grid;
  std::optional<double> kde_bandwidth;  // Silverman when unset
  bool dense_mode = false;
  BCalibrationRule b_rule = BCalibrationRule::kUnitSlope;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RampState {
  int t = 0;
  Vector beta_hat;
  Vector beta_tilde;
  Vector z;
  Vector score;  // G(z; b)
  double b = 0.0;
  double zeta_emp_sq = 0.0;
  double theta = 0.0;
  int support_size = 0;
};

struct RampResult {
  Vector beta_hat;
  Vector beta_tilde;  // the debiased vector that produced beta_hat
  Vector z;
  Vector score;  // G(z; b) that produced beta_tilde
  double theta = 0.0;
  double zeta_emp_sq = 0.0;
  double b = 0.0;
  double amse_hat = 0.0;
  double final_tol = 0.0;
  double zeta_drift = 0.0;  // |zeta^2_(t) - zeta^2_(t-1)| at exit
  int iterations_used = 0;
  int sparsity_used = 0;
  bool converged = false;
  std::vector<double> zeta_emp_sq_trace;
  std::vector<double> b_trace;
  std::vector<double> tol_trace;
  std::vector<int> support_trace;  // support size of the iterate entering each iteration
};

double soft_threshold(double x, double theta);
Vector soft_threshold(const Vector& x, double theta);

// Adjusted residuals: Y - X beta_hat_now + n^{-1} score_prev * #{j : eta(beta_hat_prev + X^T score_prev; theta_prev) != 0}.
// The count is redone from its definition rather than read off beta_hat_now. An empty
// score_prev (first iteration) yields Y - X beta_hat_now.
Vector adjust_residuals(const ProblemInstance& instance, const Vector& beta_hat_now,
                        const Vector& beta_hat_prev, const Vector& score_prev, double theta_prev,
                        bool dense_mode);

// Right-hand side of the score equation at scale b (empirical CDF + Gaussian KDE of z).
double score_equation_rhs(const Vector& z, const CompositeQuantileLoss& loss, double b,
                          double kde_bandwidth);
// n^{-1} #{i : z_i in a flat band at scale b}.
double empirical_flat_probability(const Vector& z, const CompositeQuantileLoss& loss, double b);
// Kernel-smoothed probability that z falls in a flat band at scale b.
double smoothed_flat_probability(const Vector& z, const CompositeQuantileLoss& loss, double b,
                                 double kde_bandwidth);

double calibrate_b(const Vector& z, const Loss& loss, int s, int n, const BGrid& grid,
                   std::optional<double> kde_bandwidth,
                   BCalibrationRule rule = BCalibrationRule::kUnitSlope);

// Same, with the target ratio s/n given directly (population version used by state evolution).
double calibrate_b_ratio(const Vector& z, const Loss& loss, double target, const BGrid& grid,
                         std::optional<double> kde_bandwidth, BCalibrationRule rule = BCalibrationRule::kUnitSlope);

// Resolves the assumed sparsity for the current iterate.
int assumed_sparsity(const ProblemInstance& instance, const RampConfig& config, int support_size);

RampResult run_single_ramp(const ProblemInstance& instance, const Loss& loss, const RampConfig& config);

double lambda_from_alpha(double alpha, double zeta_bar, double b, double delta, const DistributionSpec& b0,
                         std::size_t mc_samples = 100000, std::uint64_t seed = 0);

enum class L1OracleMethod { kPrimalDual, kSubgradient };

struct L1OracleConfig {
  int iters = 20000;
  L1OracleMethod method = L1OracleMethod::kPrimalDual;
  double step0 = 1.0;  // subgradient: step_k = step0 / sqrt(k + 1)
};

struct L1OracleResult {
  Vector beta;
  double objective = 0.0;
  std::vector<double> objective_trace;  // best objective every 100 iterations
};

// sum_i rho(Y_i - X_i beta) + lambda ||beta||_1
double composite_l1_objective(const ProblemInstance& instance, const Loss& loss, double lambda,
                              const Vector& beta);

L1OracleResult reference_composite_l1(const ProblemInstance& instance, const Loss& loss, double lambda,
                                      const L1OracleConfig& config = {});

}  // namespace ramp
