#include "ramp/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <regex>
#include <thread>

#include "ramp/model.hpp"

namespace ramp {

void SimulationConfig::validate() const {
  if (n < 2 || p < 2) throw Error("simulation: n and p must be at least 2");
  if (s < 0 || s > p) throw Error("simulation: s must lie in [0, p]");
  if (replicates < 1) throw Error("simulation: need at least one replicate");
  if (threads < 1) throw Error("simulation: threads must be positive");
  if (!(sigma_x >= 0.0 && sigma_x < 1.0)) throw Error("simulation: sigma_x must lie in [0, 1)");
  coefficients.validate();
  errors.validate();
  if (suite.estimators.empty()) throw Error("simulation: no estimators requested");
}

int table_number(const std::string& tag) {
  static const std::regex re(R"(^table([1-5])(-.*)?$)");
  std::smatch m;
  if (!std::regex_match(tag, m, re)) return 0;
  return std::stoi(m[1].str());
}

SimulationConfig SimulationConfig::from_tag(const std::string& tag) {
  static const std::regex re(R"(^table([1-5])-(normal|t3|mixture)-s([0-9]+)(-gauss)?(-sx([0-9.]+))?$)");
  std::smatch m;
  if (!std::regex_match(tag, m, re)) {
    throw Error("unrecognized table tag '" + tag + "' (expected e.g. table1-t3-s5, table4-t3-s5-sx0.3)");
  }
  SimulationConfig c;
  c.table_tag = tag;
  const std::string fam = m[2].str();
  if (fam == "normal") c.errors = DistributionSpec::gaussian(0.0, 1.0).with_target_sd(0.2);
  else if (fam == "t3") c.errors = DistributionSpec::student_t(3).with_target_sd(0.2);
  else c.errors = DistributionSpec::mixture({0.5, 0.5}, {0.0, 5.0}, {1.0, 3.0}).with_target_sd(0.2);
  c.s = std::stoi(m[3].str());
  if (m[4].matched) c.coefficients = DistributionSpec::gaussian(0.0, 1.0);
  if (m[6].matched) c.sigma_x = std::stod(m[6].str());
  const int t = std::stoi(m[1].str());
  if (t == 1) c.suite.estimators = {Estimator::kMaW1, Estimator::kMaW2, Estimator::kMaEq, Estimator::kLasso};
  if (t == 3) c.suite.estimators = {Estimator::kCW1, Estimator::kCW2, Estimator::kCEq, Estimator::kLasso, Estimator::kMedian};
  if (t == 4) c.suite.estimators = {Estimator::kMaW1, Estimator::kMedian};
  if (t == 5) c.suite.estimators = {Estimator::kMaW1, Estimator::kCW1};
  return c;
}

const EstimatorRecord* ReplicateRecord::find(Estimator e) const {
  for (const auto& r : records)
    if (r.estimator == e) return &r;
  return nullptr;
}

const EstimatorSummary* SimulationResult::find(Estimator e) const {
  for (const auto& s : summary)
    if (s.estimator == e) return &s;
  return nullptr;
}

EstimatorRecord score_estimate(const EstimateOutput& est, const Vector& beta_true) {
  EstimatorRecord r;
  r.estimator = est.estimator;
  r.ok = est.ok;
  r.error = est.error;
  if (!est.ok) return r;
  if (est.beta_hat.size() != beta_true.size()) throw Error("score_estimate: dimension mismatch");
  double nz_sq = 0.0, z_sq = 0.0;
  int nz = 0, z = 0, tp = 0, tn = 0;
  for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
    const double d = est.beta_hat[j] - beta_true[j];
    if (beta_true[j] != 0.0) {
      ++nz;
      nz_sq += d * d;
      tp += est.beta_hat[j] != 0.0 ? 1 : 0;
    } else {
      ++z;
      z_sq += d * d;
      tn += est.beta_hat[j] == 0.0 ? 1 : 0;
    }
  }
  r.mse_nonzero = nz > 0 ? nz_sq / nz : 0.0;
  r.mse_zero = z > 0 ? z_sq / z : 0.0;
  r.mse_full = (nz_sq + z_sq) / static_cast<double>(beta_true.size());
  r.tp = nz > 0 ? static_cast<double>(tp) / nz : 1.0;
  r.tn = z > 0 ? static_cast<double>(tn) / z : 1.0;
  r.converged = est.converged;
  r.iterations = est.iterations;
  r.alpha = est.alpha;
  return r;
}

ReplicateRecord run_replicate(const SimulationConfig& config, int replicate) {
  const auto t0 = std::chrono::steady_clock::now();
  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.seed = derive_seed(config.seed, stream::kReplicate + static_cast<std::uint64_t>(replicate));
  Matrix X = generate_design(DesignSpec{config.n, config.p, config.sigma_x, derive_seed(rec.seed, stream::kDesign)});
  const Vector beta = generate_coefficients(config.p, config.s, config.coefficients,
                                            derive_seed(rec.seed, stream::kCoefficients));
  const Vector eps = generate_errors(config.n, config.errors, derive_seed(rec.seed, stream::kErrors));
  const ProblemInstance inst = assemble_instance(std::move(X), beta, eps);

  SuiteConfig suite = config.suite;
  suite.search.seed = derive_seed(rec.seed, stream::kWeightSearch);
  suite.ramp.seed = derive_seed(rec.seed, stream::kMonteCarlo);
  if (config.oracle_densities) suite.error_law = config.errors;
  const SuiteResult res = run_estimator_suite(inst, suite);
  rec.intercepts = res.intercepts;
  for (const auto& o : res.outputs) rec.records.push_back(score_estimate(o, beta));
  if (res.model_average) rec.ma_weights = res.model_average->weights.w;
  if (res.search) rec.c_weights = res.search->weights.w;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<EstimatorSummary> summarize(const std::vector<ReplicateRecord>& reps, const std::vector<Estimator>& order) {
  std::vector<EstimatorSummary> out;
  for (Estimator e : order) {
    EstimatorSummary s;
    s.estimator = e;
    int conv = 0;
    double sq = 0.0;
    for (const auto& r : reps) {
      const EstimatorRecord* x = r.find(e);
      if (!x || !x->ok) continue;
      ++s.n_ok;
      s.mse_nonzero += x->mse_nonzero;
      s.mse_zero += x->mse_zero;
      s.mse_full += x->mse_full;
      sq += x->mse_full * x->mse_full;
      s.tp += x->tp;
      s.tn += x->tn;
      conv += x->converged ? 1 : 0;
    }
    if (s.n_ok > 0) {
      const double k = s.n_ok;
      s.mse_nonzero /= k;
      s.mse_zero /= k;
      s.mse_full /= k;
      s.tp /= k;
      s.tn /= k;
      s.mse_full_sd = s.n_ok > 1 ? std::sqrt(std::max(0.0, (sq - k * s.mse_full * s.mse_full) / (k - 1))) : 0.0;
    }
    s.convergence_pct = reps.empty() ? 0.0 : 100.0 * conv / static_cast<double>(reps.size());
    out.push_back(s);
  }
  return out;
}

SimulationResult run_simulation(const SimulationConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SimulationResult out;
  out.config = config;
  out.replicates.resize(config.replicates);
  SimulationConfig inner = config;
  if (config.threads > 1) inner.suite.pipeline.threads = 1;

  std::atomic<int> next{0};
  std::vector<std::string> errors(config.replicates);
  auto worker = [&] {
    for (int r = next++; r < config.replicates; r = next++) {
      try {
        out.replicates[r] = run_replicate(inner, r);
      } catch (const std::exception& e) {
        errors[r] = e.what();
        out.replicates[r].replicate = r;
        warn("replicate " + std::to_string(r) + " failed: " + e.what());
      }
    }
  };
  const int workers = std::min(config.threads, config.replicates);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  out.summary = summarize(out.replicates, config.suite.estimators);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ramp
