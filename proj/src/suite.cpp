#include "ramp/suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramp/stats.hpp"

namespace ramp {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kMaW1: return "ma_w1";
    case Estimator::kMaW2: return "ma_w2";
    case Estimator::kMaEq: return "ma_eq";
    case Estimator::kCW1: return "c_w1";
    case Estimator::kCW2: return "c_w2";
    case Estimator::kCEq: return "c_eq";
    case Estimator::kLasso: return "lasso";
    case Estimator::kMedian: return "q50";
  }
  return "unknown";
}

std::vector<Estimator> all_estimators() {
  return {Estimator::kMaW1, Estimator::kMaW2, Estimator::kMaEq, Estimator::kCW1,
          Estimator::kCW2,  Estimator::kCEq,  Estimator::kLasso, Estimator::kMedian};
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : all_estimators())
    if (to_string(e) == name) return e;
  throw Error("unknown estimator '" + name + "'");
}

bool is_model_average(Estimator e) { return e == Estimator::kMaW1 || e == Estimator::kMaW2 || e == Estimator::kMaEq; }
bool is_composite(Estimator e) { return e == Estimator::kCW1 || e == Estimator::kCW2 || e == Estimator::kCEq; }

SuiteConfig SuiteConfig::simulation() { return SuiteConfig{}; }

SuiteConfig SuiteConfig::reconstruction() {
  SuiteConfig c;
  c.tuning = TuningConfig{};
  c.ramp.tol = 1e-8;
  return c;
}

const EstimateOutput* SuiteResult::find(Estimator e) const {
  for (const auto& o : outputs)
    if (o.estimator == e) return &o;
  return nullptr;
}

std::vector<double> law_densities_at_quantiles(const DistributionSpec& law, const std::vector<double>& taus) {
  std::vector<double> out;
  for (double t : taus) out.push_back(law_density(law, law_quantile(law, t)));
  return out;
}

namespace {

EstimateOutput from_run(Estimator e, const TunedRun& t) {
  EstimateOutput o;
  o.estimator = e;
  o.ok = true;
  o.beta_hat = t.run.beta_hat;
  o.converged = t.run.converged;
  o.iterations = t.run.iterations_used;
  o.alpha = t.alpha;
  o.amse_hat = t.run.amse_hat;
  return o;
}

EstimateOutput from_average(Estimator e, const PipelineResult& pr, const Vector& w) {
  EstimateOutput o;
  o.estimator = e;
  o.ok = true;
  o.beta_hat = reaverage(pr, w);
  o.converged = pr.all_converged;
  for (const auto& c : pr.components)
    if (c.ok) o.iterations = std::max(o.iterations, c.tuned.run.iterations_used);
  o.alpha = std::numeric_limits<double>::quiet_NaN();
  o.weights = w;
  return o;
}

EstimateOutput failed(Estimator e, const std::string& why) {
  EstimateOutput o;
  o.estimator = e;
  o.error = why;
  return o;
}

bool wants(const SuiteConfig& c, Estimator e) {
  return std::find(c.estimators.begin(), c.estimators.end(), e) != c.estimators.end();
}

}  // namespace

SuiteResult run_estimator_suite(const ProblemInstance& instance, const SuiteConfig& config) {
  if (config.taus.empty()) throw Error("estimator suite: no quantile levels");
  SuiteResult res;
  std::vector<EstimateOutput> done;

  const InterceptEstimate ie = estimate_intercepts(instance, config.taus, config.init, config.tuning, config.ramp);
  res.intercepts = ie.intercepts;
  if (config.error_law) {
    res.densities = law_densities_at_quantiles(*config.error_law, config.taus);
  } else {
    const Vector resid = instance.Y - instance.X * ie.init_run.run.beta_hat;
    GaussianKde kde(resid, silverman_bandwidth(resid));
    for (double u : res.intercepts) res.densities.push_back(kde(u));
  }
  if (wants(config, Estimator::kLasso)) {
    if (config.init.method == InitMethod::kLassoAmp) {
      done.push_back(from_run(Estimator::kLasso, ie.init_run));
    } else {
      try {
        done.push_back(from_run(Estimator::kLasso, tune_alpha(instance, SquaredLoss{}, config.tuning, config.ramp)));
      } catch (const Error& e) {
        done.push_back(failed(Estimator::kLasso, e.what()));
      }
    }
  }

  const auto median_it = std::find(config.taus.begin(), config.taus.end(), 0.5);
  const bool need_ma = wants(config, Estimator::kMaW1) || wants(config, Estimator::kMaW2) ||
                       wants(config, Estimator::kMaEq) ||
                       (wants(config, Estimator::kMedian) && median_it != config.taus.end());
  if (need_ma) {
    try {
      res.model_average = k_parallel_ramp(instance, config.taus, res.intercepts, config.tuning, config.ramp,
                                          config.pipeline);
    } catch (const Error& e) {
      for (Estimator m : {Estimator::kMaW1, Estimator::kMaW2, Estimator::kMaEq})
        if (wants(config, m)) done.push_back(failed(m, e.what()));
    }
  }
  if (res.model_average) {
    const PipelineResult& pr = *res.model_average;
    const int K = static_cast<int>(config.taus.size());
    if (wants(config, Estimator::kMaW1)) done.push_back(from_average(Estimator::kMaW1, pr, pr.weights.w));
    if (wants(config, Estimator::kMaW2)) {
      try {
        done.push_back(from_average(Estimator::kMaW2, pr, oracle_ma_weights(config.taus, res.densities).w));
      } catch (const Error& e) {
        done.push_back(failed(Estimator::kMaW2, e.what()));
      }
    }
    if (wants(config, Estimator::kMaEq)) done.push_back(from_average(Estimator::kMaEq, pr, equal_weights(K).w));
  }

  if (wants(config, Estimator::kMedian)) {
    const auto k = static_cast<std::size_t>(median_it - config.taus.begin());
    if (res.model_average && median_it != config.taus.end() && res.model_average->components[k].ok) {
      done.push_back(from_run(Estimator::kMedian, res.model_average->components[k].tuned));
    } else {
      try {
        const Vector resid = instance.Y - instance.X * ie.init_run.run.beta_hat;
        const double u = quantile_type7(resid, 0.5);
        done.push_back(from_run(Estimator::kMedian, tune_alpha(instance, CompositeQuantileLoss::single(0.5, u),
                                                               config.tuning, config.ramp)));
      } catch (const Error& e) {
        done.push_back(failed(Estimator::kMedian, e.what()));
      }
    }
  }

  const bool need_c = wants(config, Estimator::kCW1) || wants(config, Estimator::kCW2) || wants(config, Estimator::kCEq);
  if (need_c) {
    const int K = static_cast<int>(config.taus.size());
    // alpha is tuned once at the variance-based weights and then held fixed
    Vector w_start = equal_weights(K).w;
    try {
      w_start = oracle_composite_weights(config.taus, res.densities).w;
    } catch (const Error& e) {
      warn(std::string("composite: variance-based weights unavailable, starting from equal weights: ") + e.what());
    }
    std::optional<TunedRun> start;
    try {
      start = composite_estimate(instance, config.taus, res.intercepts, w_start, config.tuning, config.ramp);
      res.composite_alpha = start->alpha;
    } catch (const Error& e) {
      for (Estimator c : {Estimator::kCW1, Estimator::kCW2, Estimator::kCEq})
        if (wants(config, c)) done.push_back(failed(c, e.what()));
    }
    if (start) {
      RampConfig fixed = config.ramp;
      fixed.alpha = start->alpha;
      if (wants(config, Estimator::kCW1)) {
        try {
          WeightSearchConfig sc = config.search;
          res.search = composite_weight_search(instance, config.taus, res.intercepts, sc, fixed, w_start);
          TunedRun best{start->alpha, res.search->best_run, {}};
          EstimateOutput o = from_run(Estimator::kCW1, best);
          o.weights = res.search->weights.w;
          done.push_back(std::move(o));
        } catch (const Error& e) {
          done.push_back(failed(Estimator::kCW1, e.what()));
        }
      }
      if (wants(config, Estimator::kCW2)) {
        EstimateOutput o = from_run(Estimator::kCW2, *start);
        o.weights = w_start;
        done.push_back(std::move(o));
      }
      if (wants(config, Estimator::kCEq)) {
        try {
          const Vector weq = equal_weights(K).w;
          std::vector<double> wv(weq.data(), weq.data() + K);
          CompositeQuantileLoss loss(config.taus, res.intercepts, wv);
          TunedRun eq{start->alpha, run_single_ramp(instance, loss, fixed), {}};
          EstimateOutput o = from_run(Estimator::kCEq, eq);
          o.weights = weq;
          done.push_back(std::move(o));
        } catch (const Error& e) {
          done.push_back(failed(Estimator::kCEq, e.what()));
        }
      }
    }
  }

  for (Estimator e : config.estimators) {
    for (const auto& o : done) {
      if (o.estimator == e) {
        res.outputs.push_back(o);
        break;
      }
    }
  }
  return res;
}

}  // namespace ramp
