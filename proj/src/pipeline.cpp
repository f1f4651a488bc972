#include "ramp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "ramp/stats.hpp"

namespace ramp {

TuningConfig TuningConfig::simulation() {
  TuningConfig t;
  t.alpha_min = 1.3;
  return t;
}

double TuningConfig::resolve_alpha_min(double delta) const {
  if (alpha_min) return *alpha_min;
  return delta >= 1.0 ? 0.0 : alpha_min_bound(delta);
}

void TuningConfig::validate(double delta) const {
  if (mode == CandidateMode::kGrid) {
    if (grid.empty()) throw Error("tuning grid is empty");
    for (double a : grid)
      if (!(a >= 0.0) || !std::isfinite(a)) throw Error("tuning grid values must be finite and nonnegative");
    return;
  }
  if (!(gs_tol > 0.0)) throw Error("golden-section tolerance must be positive");
  const double lo = resolve_alpha_min(delta);
  if (!(lo < alpha_max)) throw Error("alpha_min must be below alpha_max");
  if (lo < 0.0) throw Error("alpha_min must be nonnegative");
}

namespace {

double alpha_min_lhs(double a) { return (1.0 + a * a) * normal_cdf(-a) - a * normal_pdf(a); }

}  // namespace

double alpha_min_bound(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("alpha_min_bound: delta must lie in (0, 1]");
  const double target = 0.5 * delta;
  if (alpha_min_lhs(0.0) <= target) return 0.0;
  double lo = 0.0;
  double hi = 10.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (alpha_min_lhs(mid) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

int golden_section_probe_bound(double lo, double hi, double tol) {
  const double phi = std::numbers::phi;
  if (hi - lo <= tol) return 2;
  return static_cast<int>(std::ceil(std::log((hi - lo) / tol) / std::log(phi))) + 2;
}

AlphaSearchResult search_alpha(const AlphaObjective& objective, double lo, double hi, const TuningConfig& tuning) {
  AlphaSearchResult out;
  auto eval = [&](double a) {
    AlphaProbe probe;
    try {
      probe = objective(a);
      probe.alpha = a;
      if (!std::isfinite(probe.objective)) {
        probe.failed = true;
        if (probe.error.empty()) probe.error = "non-finite objective";
      }
    } catch (const Error& e) {
      probe.alpha = a;
      probe.failed = true;
      probe.error = e.what();
      probe.objective = std::numeric_limits<double>::quiet_NaN();
    }
    out.probes.push_back(probe);
    return probe.failed ? std::numeric_limits<double>::infinity() : probe.objective;
  };

  if (tuning.mode == CandidateMode::kGrid) {
    for (double a : tuning.grid) eval(a);
  } else {
    const double inv_phi = 1.0 / std::numbers::phi;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > tuning.gs_tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = eval(d);
      }
    }
  }

  const AlphaProbe* best = nullptr;
  for (const auto& p : out.probes)
    if (!p.failed && (!best || p.objective < best->objective)) best = &p;
  if (!best) {
    std::ostringstream msg;
    msg << "alpha tuning: every probe failed;";
    for (const auto& p : out.probes) msg << " [alpha=" << p.alpha << ": " << p.error << "]";
    throw Error(msg.str());
  }
  out.alpha = best->alpha;
  out.objective = best->objective;
  return out;
}

TunedRun tune_alpha(const ProblemInstance& instance, const Loss& loss, const TuningConfig& tuning,
                    const RampConfig& ramp_config) {
  const double delta = static_cast<double>(instance.n) / static_cast<double>(instance.p);
  tuning.validate(delta);
  std::vector<std::pair<double, RampResult>> runs;
  auto objective = [&](double a) {
    RampConfig cfg = ramp_config;
    cfg.alpha = a;
    RampResult r = run_single_ramp(instance, loss, cfg);
    AlphaProbe probe;
    probe.objective = r.amse_hat;
    probe.converged = r.converged;
    runs.emplace_back(a, std::move(r));
    return probe;
  };
  const double lo = tuning.mode == CandidateMode::kGrid ? 0.0 : tuning.resolve_alpha_min(delta);
  AlphaSearchResult search = search_alpha(objective, lo, tuning.alpha_max, tuning);
  TunedRun out;
  out.alpha = search.alpha;
  out.probes = std::move(search.probes);
  for (auto& [a, r] : runs) {
    if (a == out.alpha) {
      out.run = std::move(r);
      break;
    }
  }
  return out;
}

std::vector<double> intercepts_from_residuals(const Vector& residuals, std::span<const double> taus) {
  if (residuals.size() < 2) throw Error("intercepts: need at least two residuals");
  if (residuals.maxCoeff() == residuals.minCoeff()) throw Error("intercepts: residuals are degenerate (all equal)");
  std::vector<double> u;
  for (double t : taus) {
    if (!(t > 0.0 && t < 1.0)) throw Error("intercepts: tau must lie in (0,1)");
    u.push_back(quantile_type7(residuals, t));
  }
  bool strict = true;
  for (std::size_t k = 1; k < u.size(); ++k) strict = strict && u[k] > u[k - 1];
  if (!strict) {
    warn("estimated intercepts are not strictly increasing; adding k * 1e-12 jitter");
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += static_cast<double>(k) * 1e-12;
    for (std::size_t k = 1; k < u.size(); ++k)
      if (!(u[k] > u[k - 1])) throw Error("intercepts: jitter could not restore strict order");
  }
  return u;
}

InterceptEstimate estimate_intercepts(const ProblemInstance& instance, std::span<const double> taus,
                                      const InterceptInit& init, const TuningConfig& tuning,
                                      const RampConfig& ramp_config) {
  InterceptEstimate out;
  if (init.method == InitMethod::kLassoAmp) {
    out.init_run = tune_alpha(instance, SquaredLoss{}, tuning, ramp_config);
  } else {
    const double u0 = quantile_type7(instance.Y, init.tau);
    out.init_run = tune_alpha(instance, CompositeQuantileLoss::single(init.tau, u0), tuning, ramp_config);
  }
  const Vector resid = instance.Y - instance.X * out.init_run.run.beta_hat;
  out.intercepts = intercepts_from_residuals(resid, taus);
  return out;
}

Vector model_average(const std::vector<Vector>& beta_hats, const Vector& w) {
  if (beta_hats.empty() || static_cast<Eigen::Index>(beta_hats.size()) != w.size()) {
    throw Error("model_average: need one weight per estimate");
  }
  const Eigen::Index p = beta_hats.front().size();
  Vector out = Vector::Zero(p);
  for (std::size_t k = 0; k < beta_hats.size(); ++k) {
    if (beta_hats[k].size() != p) throw Error("model_average: estimates differ in length");
    if (w[static_cast<Eigen::Index>(k)] != 0.0) out += w[static_cast<Eigen::Index>(k)] * beta_hats[k];
  }
  return out;
}

namespace {

ComponentResult run_component(const ProblemInstance& instance, double tau, double intercept, int k,
                              const TuningConfig& tuning, const RampConfig& ramp_config) {
  ComponentResult c;
  c.tau = tau;
  c.intercept = intercept;
  RampConfig cfg = ramp_config;
  cfg.seed = derive_seed(ramp_config.seed, static_cast<std::uint64_t>(k));
  try {
    c.tuned = tune_alpha(instance, CompositeQuantileLoss::single(tau, intercept), tuning, cfg);
    c.ok = true;
  } catch (const Error& e) {
    c.error = e.what();
    warn("component tau=" + std::to_string(tau) + " failed: " + c.error);
  }
  return c;
}

}  // namespace

PipelineResult k_parallel_ramp(const ProblemInstance& instance, std::span<const double> taus,
                               std::span<const double> intercepts, const TuningConfig& tuning,
                               const RampConfig& ramp_config, const PipelineOptions& options) {
  const int K = static_cast<int>(taus.size());
  if (K == 0 || intercepts.size() != taus.size()) throw Error("k_parallel_ramp: one intercept per quantile level");
  PipelineResult out;
  out.intercepts.assign(intercepts.begin(), intercepts.end());
  out.components.resize(K);

  const int threads = std::max(1, options.threads);
  for (int start = 0; start < K; start += threads) {
    const int stop = std::min(K, start + threads);
    if (stop - start == 1) {
      out.components[start] = run_component(instance, taus[start], intercepts[start], start, tuning, ramp_config);
      continue;
    }
    std::vector<std::future<ComponentResult>> jobs;
    for (int k = start; k < stop; ++k) {
      jobs.push_back(std::async(std::launch::async, [&, k] {
        return run_component(instance, taus[k], intercepts[k], k, tuning, ramp_config);
      }));
    }
    for (int k = start; k < stop; ++k) out.components[k] = jobs[k - start].get();
  }

  std::vector<Vector> tildes, scores, hats;
  std::vector<double> thetas;
  out.all_converged = true;
  for (int k = 0; k < K; ++k) {
    const auto& c = out.components[k];
    out.alphas.push_back(c.ok ? c.tuned.alpha : std::numeric_limits<double>::quiet_NaN());
    out.all_converged = out.all_converged && c.ok && c.tuned.run.converged;
    if (!c.ok) continue;
    out.used.push_back(k);
    tildes.push_back(c.tuned.run.beta_tilde);
    scores.push_back(c.tuned.run.score);
    hats.push_back(c.tuned.run.beta_hat);
    thetas.push_back(c.tuned.run.theta);
  }
  if (out.used.empty()) throw Error("k_parallel_ramp: every component failed");
  if (!out.all_converged) warn("k_parallel_ramp: not every component converged; using last iterates");

  out.sigma_hat = stein_sigma_hat(tildes, thetas, cross_zeta_matrix(tildes, scores, options.cross_zeta));
  WeightVector sub = simplex_qp_weights(out.sigma_hat);
  out.weights.rule = WeightRule::kMaQp;
  out.weights.attained_value = sub.attained_value;
  out.weights.w = Vector::Zero(K);
  for (std::size_t j = 0; j < out.used.size(); ++j) out.weights.w[out.used[j]] = sub.w[static_cast<Eigen::Index>(j)];
  out.beta_ma = model_average(hats, sub.w);
  return out;
}

Vector reaverage(const PipelineResult& result, const Vector& w) {
  if (w.size() != static_cast<Eigen::Index>(result.components.size())) throw Error("reaverage: one weight per component");
  std::vector<Vector> hats;
  Vector sub(static_cast<Eigen::Index>(result.used.size()));
  for (std::size_t j = 0; j < result.used.size(); ++j) {
    hats.push_back(result.components[result.used[j]].tuned.run.beta_hat);
    sub[static_cast<Eigen::Index>(j)] = w[result.used[j]];
  }
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w[k] != 0.0 && !result.components[static_cast<std::size_t>(k)].ok) {
      throw Error("reaverage: nonzero weight on a failed component");
    }
  }
  return model_average(hats, sub);
}

TunedRun composite_estimate(const ProblemInstance& instance, std::span<const double> taus,
                            std::span<const double> intercepts, const Vector& weights, const TuningConfig& tuning,
                            const RampConfig& ramp_config) {
  std::vector<double> wv(weights.data(), weights.data() + weights.size());
  CompositeQuantileLoss loss(std::vector<double>(taus.begin(), taus.end()),
                             std::vector<double>(intercepts.begin(), intercepts.end()), std::move(wv));
  return tune_alpha(instance, loss, tuning, ramp_config);
}

}  // namespace ramp
