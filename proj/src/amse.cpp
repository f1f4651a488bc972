#include "ramp/amse.hpp"

#include <cmath>

#include "ramp/stats.hpp"

namespace ramp {

double empirical_state_evolution(const Vector& z, double b, const Loss& loss, double delta, double omega) {
  if (z.size() == 0) throw Error("empirical_state_evolution: empty residuals");
  return rescaled_score(loss, z, b, delta, omega).squaredNorm() / static_cast<double>(z.size());
}

double cross_zeta(const Vector& beta_tilde_1, const Vector& beta_tilde_2) {
  if (beta_tilde_1.size() != beta_tilde_2.size()) throw Error("cross_zeta: length mismatch");
  const Eigen::Index p = beta_tilde_1.size();
  if (p < 2) throw Error("cross_zeta: need p >= 2");
  const Vector a = beta_tilde_1.array() - beta_tilde_1.mean();
  const Vector c = beta_tilde_2.array() - beta_tilde_2.mean();
  return a.dot(c) / static_cast<double>(p - 1);
}

Matrix cross_zeta_matrix(const std::vector<Vector>& beta_tildes, const std::vector<Vector>& scores,
                         CrossZetaRule rule) {
  const std::size_t K = beta_tildes.size();
  if (K == 0) throw Error("cross_zeta_matrix: no components");
  const bool need_scores = rule != CrossZetaRule::kSampleCovariance;
  if (need_scores && scores.size() != K) throw Error("cross_zeta_matrix: scores required for this rule");
  Matrix out(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t c = a; c < K; ++c) {
      double v = 0.0;
      if (rule == CrossZetaRule::kScoreProduct || (rule == CrossZetaRule::kStateEvolutionDiagonal && a == c)) {
        if (scores[a].size() != scores[c].size() || scores[a].size() == 0) {
          throw Error("cross_zeta_matrix: score length mismatch");
        }
        v = scores[a].dot(scores[c]) / static_cast<double>(scores[a].size());
      } else {
        v = cross_zeta(beta_tildes[a], beta_tildes[c]);
      }
      out(a, c) = v;
      out(c, a) = v;
    }
  }
  return out;
}

SigmaMatrix stein_sigma_hat(const std::vector<Vector>& beta_tildes, const std::vector<double>& thetas,
                            const Matrix& cross_zetas) {
  const std::size_t K = beta_tildes.size();
  if (K == 0 || thetas.size() != K) throw Error("stein_sigma_hat: need K debiased vectors and K thresholds");
  if (cross_zetas.rows() != static_cast<Eigen::Index>(K) || cross_zetas.cols() != static_cast<Eigen::Index>(K)) {
    throw Error("stein_sigma_hat: cross-zeta matrix must be K x K");
  }
  const Eigen::Index p = beta_tildes.front().size();
  for (std::size_t k = 0; k < K; ++k) {
    if (beta_tildes[k].size() != p) throw Error("stein_sigma_hat: dimension mismatch");
    if (!(thetas[k] >= 0.0)) throw Error("stein_sigma_hat: thresholds must be nonnegative");
  }
  std::vector<Vector> shrink(K);  // eta(bt) - bt
  std::vector<Vector> active(K);  // 1{|bt| >= theta}
  for (std::size_t k = 0; k < K; ++k) {
    shrink[k] = soft_threshold(beta_tildes[k], thetas[k]) - beta_tildes[k];
    active[k] = (beta_tildes[k].array().abs() >= thetas[k]).cast<double>();
  }
  const double inv_p = 1.0 / static_cast<double>(p);
  SigmaMatrix out;
  out.kind = SigmaKind::kStein;
  out.entries.resize(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t c = 0; c < K; ++c) {
      const double cz = cross_zetas(a, c);
      out.entries(a, c) = -cz + inv_p * shrink[a].dot(shrink[c]) + cz * inv_p * (active[a].sum() + active[c].sum());
    }
  }
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  return out;
}

double composite_amse_hat(const Vector& beta_tilde, double theta, double zeta_emp_sq) {
  const SigmaMatrix s = stein_sigma_hat({beta_tilde}, {theta}, Matrix::Constant(1, 1, zeta_emp_sq));
  return s.entries(0, 0);
}

SigmaMatrix empirical_sigma_oracle(const std::vector<Vector>& beta_hats, const std::optional<Vector>& beta_true) {
  if (!beta_true) throw Error("empirical_sigma_oracle: true coefficients are not available");
  const std::size_t K = beta_hats.size();
  if (K == 0) throw Error("empirical_sigma_oracle: no components");
  Matrix err(beta_true->size(), static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    if (beta_hats[k].size() != beta_true->size()) throw Error("empirical_sigma_oracle: dimension mismatch");
    err.col(static_cast<Eigen::Index>(k)) = beta_hats[k] - *beta_true;
  }
  SigmaMatrix out;
  out.kind = SigmaKind::kOracle;
  out.entries = err.transpose() * err / static_cast<double>(beta_true->size());
  return out;
}

SigmaMatrix dense_sigma_hat(const std::vector<Vector>& beta_hats) {
  const std::size_t K = beta_hats.size();
  if (K == 0) throw Error("dense_sigma_hat: no components");
  SigmaMatrix out;
  out.kind = SigmaKind::kEmpirical;
  out.entries.resize(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t c = a; c < K; ++c) {
      out.entries(a, c) = out.entries(c, a) = cross_zeta(beta_hats[a], beta_hats[c]);
    }
  }
  return out;
}

namespace {

struct SeSample {
  Vector eps;
  Vector z_resid;
  Vector b0;
  Vector z_coef;
};

SeSample draw_se_sample(const DistributionSpec& eps_dist, const StateEvolutionOptions& options, bool sparse) {
  if (options.mc_samples < 2) throw Error("state evolution: mc_samples too small");
  SeSample s;
  Rng rng(derive_seed(options.seed, stream::kMonteCarlo));
  s.eps = sample_law(eps_dist, options.mc_samples, rng);
  std::normal_distribution<double> normal;
  s.z_resid.resize(static_cast<Eigen::Index>(options.mc_samples));
  for (Eigen::Index i = 0; i < s.z_resid.size(); ++i) s.z_resid[i] = normal(rng);
  if (sparse) {
    s.b0 = sample_law(*options.coefficient_law, options.mc_samples, rng);
    s.z_coef.resize(static_cast<Eigen::Index>(options.mc_samples));
    for (Eigen::Index i = 0; i < s.z_coef.size(); ++i) s.z_coef[i] = normal(rng);
  }
  return s;
}

SeCoupling resolve_coupling(const StateEvolutionOptions& options, double omega) {
  if (options.coupling != SeCoupling::kAuto) return options.coupling;
  if (options.coefficient_law) return SeCoupling::kSparse;
  if (omega >= 1.0) return SeCoupling::kDense;
  return SeCoupling::kLiteral;
}

double residual_variance(const SeSample& s, SeCoupling coupling, double zeta_sq, double delta, double alpha) {
  switch (coupling) {
    case SeCoupling::kLiteral:
      return zeta_sq;
    case SeCoupling::kDense:
      return zeta_sq / delta;
    case SeCoupling::kSparse: {
      const double zeta = std::sqrt(zeta_sq);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < s.b0.size(); ++i) {
        const double e = soft_threshold(s.b0[i] + zeta * s.z_coef[i], alpha * zeta) - s.b0[i];
        acc += e * e;
      }
      return acc / static_cast<double>(s.b0.size()) / delta;
    }
    case SeCoupling::kAuto:
      break;
  }
  throw Error("state evolution: unresolved coupling");
}

StateEvolutionPoint zeta_map(const Loss& loss, const SeSample& s, double delta, double omega, double sigma_sq,
                             const StateEvolutionOptions& options) {
  StateEvolutionPoint pt;
  pt.sigma_sq = sigma_sq;
  const Vector z = s.eps + std::sqrt(sigma_sq) * s.z_resid;
  const double target = omega / delta;
  if (!(sample_sd(z) > 0.0)) {
    // degenerate residual law: every score vanishes at the point of concentration only if it is
    // the origin; report that case and reject others
    if (z.cwiseAbs().maxCoeff() != 0.0 && !std::holds_alternative<SquaredLoss>(loss)) {
      throw Error("state evolution: degenerate residual law away from zero");
    }
    pt.b = std::holds_alternative<SquaredLoss>(loss) ? target / (1.0 - target) : 0.0;
    pt.zeta_sq = std::holds_alternative<SquaredLoss>(loss) ? z.squaredNorm() / static_cast<double>(z.size()) : 0.0;
    return pt;
  }
  pt.b = calibrate_b_ratio(z, loss, target, options.b_grid, std::nullopt, options.b_rule);
  pt.zeta_sq = empirical_state_evolution(z, pt.b, loss, delta, omega);
  return pt;
}

}  // namespace

StateEvolutionPoint state_evolution_step(const Loss& loss, const DistributionSpec& eps_dist, double delta,
                                         double omega, double zeta_sq, const StateEvolutionOptions& options) {
  const SeCoupling coupling = resolve_coupling(options, omega);
  if (coupling == SeCoupling::kSparse && !options.coefficient_law) {
    throw Error("state evolution: sparse coupling needs a coefficient law");
  }
  const SeSample s = draw_se_sample(eps_dist, options, coupling == SeCoupling::kSparse);
  return zeta_map(loss, s, delta, omega, residual_variance(s, coupling, zeta_sq, delta, options.alpha), options);
}

StateEvolutionPoint fixed_point_state_evolution(const Loss& loss, const DistributionSpec& eps_dist, double delta,
                                                double omega, const StateEvolutionOptions& options) {
  if (!(delta > 0.0) || !(omega > 0.0)) throw Error("state evolution: delta and omega must be positive");
  if (options.max_iters < 1 || !(options.ftol > 0.0)) throw Error("state evolution: invalid iteration control");
  const SeCoupling coupling = resolve_coupling(options, omega);
  if (coupling == SeCoupling::kSparse && !options.coefficient_law) {
    throw Error("state evolution: sparse coupling needs a coefficient law");
  }
  const SeSample s = draw_se_sample(eps_dist, options, coupling == SeCoupling::kSparse);

  // start from beta_hat = 0: residual variance E[B0^2] / delta, or zero without a coefficient law
  double sigma_sq = coupling == SeCoupling::kSparse ? s.b0.squaredNorm() / static_cast<double>(s.b0.size()) / delta : 0.0;
  StateEvolutionPoint pt = zeta_map(loss, s, delta, omega, sigma_sq, options);
  pt.zeta_sq_trace.push_back(pt.zeta_sq);
  for (int it = 1; it <= options.max_iters; ++it) {
    sigma_sq = residual_variance(s, coupling, pt.zeta_sq, delta, options.alpha);
    StateEvolutionPoint next = zeta_map(loss, s, delta, omega, sigma_sq, options);
    if (!std::isfinite(next.zeta_sq)) break;
    next.zeta_sq_trace = std::move(pt.zeta_sq_trace);
    next.zeta_sq_trace.push_back(next.zeta_sq);
    next.iterations = it;
    const double change = std::abs(next.zeta_sq - pt.zeta_sq);
    const auto& tr = next.zeta_sq_trace;
    // the Monte Carlo b-equation is a step function of zeta, so the map can settle on a 2-cycle
    const bool cycle = tr.size() >= 3 && std::abs(tr[tr.size() - 1] - tr[tr.size() - 3]) <= options.ftol;
    pt = std::move(next);
    if (change <= options.ftol || cycle) {
      pt.converged = true;
      break;
    }
  }
  if (!pt.converged) warn("state evolution did not reach a fixed point within max_iters");
  return pt;
}

double huber_variance(const Loss& loss, double b, const DistributionSpec& f_tilde, std::size_t mc_samples,
                      std::uint64_t seed) {
  if (!(b > 0.0)) throw Error("huber_variance: b must be positive");
  if (mc_samples < 1) throw Error("huber_variance: mc_samples must be positive");
  Rng rng(derive_seed(seed, stream::kMonteCarlo));
  const Vector x = sample_law(f_tilde, mc_samples, rng);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double g = effective_score(loss, x[i], b);
    num += g * g;
    den += effective_score_slope(loss, x[i], b);
  }
  num /= static_cast<double>(x.size());
  den /= static_cast<double>(x.size());
  if (!(den > 0.0)) throw Error("huber_variance: estimated score slope is not positive (increase b or mc_samples)");
  return num / (den * den);
}

}  // namespace ramp
