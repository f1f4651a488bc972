#include "ramp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ramp/amse.hpp"
#include "ramp/stats.hpp"

namespace ramp {

void RampConfig::validate() const {
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (!dense_mode && !(alpha > 0.0)) throw Error("alpha must be positive");
  if (sparsity_mode == SparsityMode::kFixed && sparsity < 1) throw Error("fixed sparsity must be >= 1");
  if (!(support_multiplier > 0.0)) throw Error("support_multiplier must be positive");
  if (!(b_grid.max_multiplier > 0.0) || b_grid.n_points < 2) throw Error("invalid b grid");
  if (kde_bandwidth && !(*kde_bandwidth > 0.0)) throw Error("kde bandwidth must be positive");
}

double soft_threshold(double x, double theta) {
  if (x > theta) return x - theta;
  if (x < -theta) return x + theta;
  return 0.0;
}

Vector soft_threshold(const Vector& x, double theta) {
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = soft_threshold(x[j], theta);
  return out;
}

Vector adjust_residuals(const ProblemInstance& instance, const Vector& beta_hat_now,
                        const Vector& beta_hat_prev, const Vector& score_prev, double theta_prev,
                        bool dense_mode) {
  if (beta_hat_now.size() != instance.p) throw Error("adjust_residuals: beta has wrong length");
  Vector z = instance.Y - instance.X * beta_hat_now;
  if (score_prev.size() == 0) return z;
  if (score_prev.size() != instance.n || beta_hat_prev.size() != instance.p) {
    throw Error("adjust_residuals: previous state has wrong shape");
  }
  const Vector pseudo = beta_hat_prev + instance.X.transpose() * score_prev;
  long count = 0;
  for (Eigen::Index j = 0; j < pseudo.size(); ++j) {
    const double v = dense_mode ? pseudo[j] : soft_threshold(pseudo[j], theta_prev);
    if (v != 0.0) ++count;
  }
  z += score_prev * (static_cast<double>(count) / static_cast<double>(instance.n));
  return z;
}

namespace {

double bandwidth_for(const Vector& z, std::optional<double> fixed) {
  if (fixed) return *fixed;
  const double h = silverman_bandwidth(z);
  if (!(h > 0.0)) throw Error("residuals are degenerate (zero spread)");
  return h;
}

std::vector<double> make_grid(const Vector& z, const BGrid& grid) {
  const double sd = sample_sd(z);
  if (!(sd > 0.0) || !std::isfinite(sd)) throw Error("residuals are degenerate (zero spread)");
  const double step = grid.max_multiplier * sd / grid.n_points;
  std::vector<double> g(static_cast<std::size_t>(grid.n_points));
  for (int k = 0; k < grid.n_points; ++k) g[static_cast<std::size_t>(k)] = step * (k + 1);
  return g;
}

double score_rhs(const EmpiricalCdf& F, const GaussianKde& f, const CompositeQuantileLoss& loss, double b) {
  const auto& u = loss.intercepts();
  const auto& h = loss.h();
  double density_part = 0.0;
  double mass_part = 0.0;
  for (std::size_t l = 1; l <= u.size(); ++l) {
    const double left = u[l - 1] + b * h[l - 1];
    const double right = u[l - 1] + b * h[l];
    density_part += h[l - 1] * f(left) - h[l] * f(right);
    mass_part += F(right) - F(left);
  }
  return b * density_part + mass_part;
}

double flat_mass(const GaussianKernelCdf& F, const CompositeQuantileLoss& loss, double b) {
  const auto& u = loss.intercepts();
  const auto& h = loss.h();
  double acc = 0.0;
  for (std::size_t l = 1; l <= u.size(); ++l) acc += F.mass(u[l - 1] + b * h[l - 1], u[l - 1] + b * h[l]);
  return acc;
}

class FlatCounter {
 public:
  explicit FlatCounter(const Vector& z) : sorted_(z.data(), z.data() + z.size()) {
    std::sort(sorted_.begin(), sorted_.end());
  }
  long operator()(const CompositeQuantileLoss& loss, double b) const {
    const auto& u = loss.intercepts();
    const auto& h = loss.h();
    long c = 0;
    for (std::size_t l = 1; l <= u.size(); ++l) {
      const double left = u[l - 1] + b * h[l - 1];
      const double right = u[l - 1] + b * h[l];
      c += std::upper_bound(sorted_.begin(), sorted_.end(), right) -
           std::lower_bound(sorted_.begin(), sorted_.end(), left);
    }
    return c;
  }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

CalibrationError no_crossing(const std::string& why, const std::vector<double>& grid,
                             const std::vector<double>& rhs) {
  return CalibrationError("b calibration failed: " + why, grid, rhs);
}

}  // namespace

double score_equation_rhs(const Vector& z, const CompositeQuantileLoss& loss, double b, double kde_bandwidth) {
  return score_rhs(EmpiricalCdf(z), GaussianKde(z, kde_bandwidth), loss, b);
}

double empirical_flat_probability(const Vector& z, const CompositeQuantileLoss& loss, double b) {
  return static_cast<double>(FlatCounter(z)(loss, b)) / static_cast<double>(z.size());
}

double smoothed_flat_probability(const Vector& z, const CompositeQuantileLoss& loss, double b,
                                 double kde_bandwidth) {
  return flat_mass(GaussianKernelCdf(z, kde_bandwidth), loss, b);
}

double calibrate_b(const Vector& z, const Loss& loss, int s, int n, const BGrid& grid,
                   std::optional<double> kde_bandwidth, BCalibrationRule rule) {
  if (s < 1) throw Error("calibrate_b: sparsity must be >= 1");
  if (n < 1) throw Error("calibrate_b: n must be >= 1");
  if (std::holds_alternative<SquaredLoss>(loss) && s >= n) {
    throw Error("calibrate_b: squared loss needs n > s (delta > omega)");
  }
  return calibrate_b_ratio(z, loss, static_cast<double>(s) / static_cast<double>(n), grid, kde_bandwidth, rule);
}

double calibrate_b_ratio(const Vector& z, const Loss& loss, double target, const BGrid& grid,
                         std::optional<double> kde_bandwidth, BCalibrationRule rule) {
  if (!(target > 0.0)) throw Error("calibrate_b: s/n must be positive");
  const auto* cq = std::get_if<CompositeQuantileLoss>(&loss);
  if (!cq) {
    // (n/s) * b / (1 + b) = 1
    if (target >= 1.0) throw Error("calibrate_b: squared loss needs n > s (delta > omega)");
    return target / (1.0 - target);
  }
  const std::vector<double> bs = make_grid(z, grid);
  const double h = bandwidth_for(z, kde_bandwidth);

  if (rule == BCalibrationRule::kScoreEquation) {
    const EmpiricalCdf F(z);
    const GaussianKde f(z, h);
    std::vector<double> rhs;
    rhs.reserve(bs.size());
    for (std::size_t k = 0; k < bs.size(); ++k) {
      rhs.push_back(score_rhs(F, f, *cq, bs[k]));
      if (rhs.back() >= target) return 0.5 * ((k == 0 ? 0.0 : bs[k - 1]) + bs[k]);
    }
    throw no_crossing("score equation stays below s/n on the whole grid", bs, rhs);
  }

  if (target >= 1.0) throw no_crossing("s/n must be below one", bs, {});

  // Smallest b (grid bracket, then bisection) at which mass(b) >= level.
  auto first_crossing = [&](auto&& mass, double level) -> std::optional<std::pair<double, double>> {
    std::size_t k = 0;
    while (k < bs.size() && mass(bs[k]) < level) ++k;
    if (k == bs.size()) return std::nullopt;
    double a = k == 0 ? 0.0 : bs[k - 1];
    double c = bs[k];
    for (int it = 0; it < 60 && c - a > 1e-12 * c; ++it) {
      const double m = 0.5 * (a + c);
      if (mass(m) >= level) {
        c = m;
      } else {
        a = m;
      }
    }
    return std::make_pair(a, c);
  };
  auto trace = [&](auto&& mass) {
    std::vector<double> rhs;
    for (double b : bs) rhs.push_back(mass(b));
    return rhs;
  };

  if (rule == BCalibrationRule::kUnitSlopeSmoothed) {
    const GaussianKernelCdf F(z, h);
    auto mass = [&](double b) { return flat_mass(F, *cq, b); };
    const auto hit = first_crossing(mass, target);
    if (!hit) throw no_crossing("flat-band mass stays below s/n on the whole grid", bs, trace(mass));
    return 0.5 * (hit->first + hit->second);
  }

  const FlatCounter count(z);
  const double n = static_cast<double>(count.size());
  auto mass = [&](double b) { return static_cast<double>(count(*cq, b)) / n; };
  // s residuals in flat bands: between the s-th and the (s+1)-th entry scale
  const auto enter = first_crossing(mass, target * (1.0 - 1e-12));
  if (!enter) throw no_crossing("fewer than s residuals reach a flat band on the whole grid", bs, trace(mass));
  const auto next = first_crossing(mass, target + 0.5 / n);
  const double hi = next ? next->first : bs.back();
  return 0.5 * (enter->second + std::max(hi, enter->second));
}

int assumed_sparsity(const ProblemInstance& instance, const RampConfig& config, int support_size) {
  if (config.dense_mode) return instance.p;
  switch (config.sparsity_mode) {
    case SparsityMode::kFixed:
      return config.sparsity;
    case SparsityMode::kFromInstance:
      if (instance.s_hint && *instance.s_hint >= 1) return *instance.s_hint;
      [[fallthrough]];
    case SparsityMode::kSupport:
      break;
  }
  const int scaled = static_cast<int>(std::ceil(config.support_multiplier * support_size - 1e-9));
  return std::clamp(scaled, 1, std::max(1, instance.n / 2));
}

namespace {

int count_nonzero(const Vector& v) {
  int c = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) c += v[j] != 0.0 ? 1 : 0;
  return c;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

RampResult run_single_ramp(const ProblemInstance& instance, const Loss& loss, const RampConfig& config) {
  config.validate();
  const int n = instance.n;
  const int p = instance.p;
  if (instance.X.rows() != n || instance.X.cols() != p || instance.Y.size() != n) {
    throw Error("run_single_ramp: instance shape mismatch");
  }
  const double delta = static_cast<double>(n) / static_cast<double>(p);

  RampResult result;
  RampState state;
  state.beta_hat = Vector::Zero(p);
  Vector beta_prev;
  Vector score_prev;
  double theta_prev = 0.0;

  auto fail = [&](const std::string& what, int t) {
    throw DivergenceError(what + " at iteration " + std::to_string(t), t, result.zeta_emp_sq_trace);
  };

  for (int t = 0; t < config.max_iters; ++t) {
    state.t = t;
    state.z = adjust_residuals(instance, state.beta_hat, beta_prev, score_prev, theta_prev, config.dense_mode);
    if (!all_finite(state.z)) fail("non-finite adjusted residuals", t);
    state.support_size = count_nonzero(state.beta_hat);
    int s = assumed_sparsity(instance, config, state.support_size);
    if (config.monotone_sparsity && t > 0) s = std::max(s, result.sparsity_used);
    try {
      state.b = calibrate_b(state.z, loss, s, n, config.b_grid, config.kde_bandwidth, config.b_rule);
    } catch (const CalibrationError& e) {
      throw CalibrationError(std::string(e.what()) + " (iteration " + std::to_string(t) + ")", e.grid(), e.rhs());
    }
    const double omega = static_cast<double>(s) / static_cast<double>(p);
    state.score = rescaled_score(loss, state.z, state.b, delta, omega);
    state.zeta_emp_sq = empirical_state_evolution(state.z, state.b, loss, delta, omega);
    state.theta = config.dense_mode ? 0.0 : config.alpha * std::sqrt(state.zeta_emp_sq);
    state.beta_tilde = state.beta_hat + instance.X.transpose() * state.score;
    Vector beta_next = config.dense_mode ? state.beta_tilde : soft_threshold(state.beta_tilde, state.theta);
    if (!all_finite(beta_next) || !std::isfinite(state.zeta_emp_sq)) fail("non-finite iterate", t);

    const double tol = (beta_next - state.beta_hat).squaredNorm() / static_cast<double>(p);
    result.zeta_emp_sq_trace.push_back(state.zeta_emp_sq);
    result.b_trace.push_back(state.b);
    result.tol_trace.push_back(tol);
    result.support_trace.push_back(state.support_size);
    result.sparsity_used = s;

    beta_prev = std::move(state.beta_hat);
    score_prev = state.score;
    theta_prev = state.theta;
    state.beta_hat = std::move(beta_next);
    result.iterations_used = t + 1;
    result.final_tol = tol;
    if (tol <= config.tol) {
      result.converged = true;
      break;
    }
  }

  result.beta_hat = state.beta_hat;
  result.beta_tilde = state.beta_tilde;
  result.z = state.z;
  result.score = state.score;
  result.theta = state.theta;
  result.zeta_emp_sq = state.zeta_emp_sq;
  result.b = state.b;
  const auto& tr = result.zeta_emp_sq_trace;
  result.zeta_drift = tr.size() >= 2 ? std::abs(tr[tr.size() - 1] - tr[tr.size() - 2]) : 0.0;
  if (tr.size() >= 2 && result.zeta_drift > 0.1 * result.zeta_emp_sq) {
    std::ostringstream msg;
    msg << "state evolution still moving at exit: |dzeta^2| = " << result.zeta_drift
        << " vs zeta^2 = " << result.zeta_emp_sq;
    warn(msg.str());
  }
  result.amse_hat = composite_amse_hat(result.beta_tilde, result.theta, result.zeta_emp_sq);
  return result;
}

namespace {

// P(|m + sqrt(v) Z| >= c) for a Gaussian (v may be 0: point mass).
double two_sided_tail(double m, double sd, double c) {
  if (sd == 0.0) return std::abs(m) >= c ? 1.0 : 0.0;
  return normal_cdf((-c - m) / sd) + normal_cdf((m - c) / sd);
}

}  // namespace

double lambda_from_alpha(double alpha, double zeta_bar, double b, double delta, const DistributionSpec& b0,
                         std::size_t mc_samples, std::uint64_t seed) {
  if (!(zeta_bar > 0.0) || !(b > 0.0) || !(delta > 0.0)) throw Error("lambda_from_alpha: zeta, b, delta must be positive");
  if (!(alpha >= 0.0)) throw Error("lambda_from_alpha: alpha must be nonnegative");
  b0.validate();
  const double c = alpha * zeta_bar;
  double prob = 0.0;
  bool exact = !b0.target_sd.has_value();
  if (exact) {
    if (const auto* pm = std::get_if<PointMass>(&b0.kind)) {
      prob = two_sided_tail(pm->value, zeta_bar, c);
    } else if (std::holds_alternative<DiracPm1>(b0.kind)) {
      prob = two_sided_tail(1.0, zeta_bar, c);
    } else if (const auto* g = std::get_if<Gaussian>(&b0.kind)) {
      prob = two_sided_tail(g->mean, std::hypot(g->sd, zeta_bar), c);
    } else if (const auto* mix = std::get_if<GaussianMixture>(&b0.kind)) {
      for (std::size_t k = 0; k < mix->weights.size(); ++k) {
        prob += mix->weights[k] * two_sided_tail(mix->means[k], std::hypot(mix->sds[k], zeta_bar), c);
      }
    } else {
      exact = false;
    }
  }
  if (!exact) {
    if (mc_samples == 0) throw Error("lambda_from_alpha: mc_samples must be positive");
    Rng rng(derive_seed(seed, stream::kMonteCarlo));
    std::normal_distribution<double> normal;
    const Vector draws = sample_law(b0, mc_samples, rng);
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < draws.size(); ++i) {
      if (std::abs(draws[i] + zeta_bar * normal(rng)) >= c) ++hits;
    }
    prob = static_cast<double>(hits) / static_cast<double>(mc_samples);
  }
  return c / (b * delta) * prob;
}

double composite_l1_objective(const ProblemInstance& instance, const Loss& loss, double lambda,
                              const Vector& beta) {
  const Vector r = instance.Y - instance.X * beta;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += loss_value(loss, r[i]);
  return acc + lambda * beta.lpNorm<1>();
}

namespace {

double spectral_norm(const Matrix& X) {
  Vector v = Vector::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
  double est = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = X.transpose() * (X * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (std::abs(nw - est) <= 1e-12 * nw) {
      est = nw;
      break;
    }
    est = nw;
  }
  return std::sqrt(est);
}

}  // namespace

L1OracleResult reference_composite_l1(const ProblemInstance& instance, const Loss& loss, double lambda,
                                      const L1OracleConfig& config) {
  if (!(lambda >= 0.0)) throw Error("reference_composite_l1: lambda must be nonnegative");
  const Matrix& X = instance.X;
  const Vector& Y = instance.Y;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  L1OracleResult out;
  Vector beta = Vector::Zero(p);
  out.beta = beta;
  out.objective = composite_l1_objective(instance, loss, lambda, beta);

  auto consider = [&](const Vector& cand) {
    const double obj = composite_l1_objective(instance, loss, lambda, cand);
    if (obj < out.objective) {
      out.objective = obj;
      out.beta = cand;
    }
  };

  if (config.method == L1OracleMethod::kPrimalDual) {
    const double L = spectral_norm(X);
    if (L == 0.0) return out;
    const double sigma = 0.99 / L;
    const double tau = 0.99 / L;
    Vector y = Vector::Zero(n);
    Vector bar = beta;
    for (int k = 0; k < config.iters; ++k) {
      // dual step on f(v) = rho(Y - v) through the Moreau identity
      Vector v = y + sigma * (X * bar);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = prox(loss, Y[i] - v[i] / sigma, 1.0 / sigma);
        v[i] -= sigma * (Y[i] - x);
      }
      y = std::move(v);
      Vector next = soft_threshold(beta - tau * (X.transpose() * y), tau * lambda);
      bar = 2.0 * next - beta;
      beta = std::move(next);
      if (k % 10 == 9) consider(beta);
      if (k % 100 == 99) out.objective_trace.push_back(out.objective);
    }
    consider(beta);
    return out;
  }

  for (int k = 0; k < config.iters; ++k) {
    const Vector r = Y - X * beta;
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Interval sg = subgradient(loss, r[i]);
      g[i] = 0.5 * (sg.lo + sg.hi);
    }
    const double step = config.step0 / std::sqrt(static_cast<double>(k) + 1.0);
    beta = soft_threshold(beta + step * (X.transpose() * g), step * lambda);
    consider(beta);
    if (k % 100 == 99) out.objective_trace.push_back(out.objective);
  }
  return out;
}

}  // namespace ramp
