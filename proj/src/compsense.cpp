#include "ramp/compsense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ramp {

ProblemInstance CompressedSample::instance(const Vector& beta_true) const {
  ProblemInstance inst = make_instance(X, Y);
  inst.beta_true = beta_true;
  inst.errors = errors;
  return inst;
}

CompressedSample compress_and_corrupt(const Vector& beta, double delta_prime, const DistributionSpec& corruption,
                                      std::uint64_t seed) {
  if (!(delta_prime > 0.0 && delta_prime <= 1.0)) throw Error("compress_and_corrupt: delta' must lie in (0, 1]");
  const int p = static_cast<int>(beta.size());
  const int n = static_cast<int>(std::floor(delta_prime * p));
  if (n < 2) throw Error("compress_and_corrupt: fewer than two measurements");
  CompressedSample out;
  out.delta_prime = delta_prime;
  out.corruption = corruption;
  out.X = generate_design(DesignSpec{n, p, 0.0, derive_seed(seed, stream::kDesign)});
  out.errors = generate_errors(n, corruption, derive_seed(seed, stream::kErrors));
  out.Y = out.X * beta + out.errors;
  return out;
}

ReconstructionReport score(const Vector& beta_hat, const Vector& beta_true, const std::string& estimator) {
  if (beta_hat.size() != beta_true.size() || beta_true.size() == 0) throw Error("score: vectors must be conformable");
  ReconstructionReport r;
  r.estimator = estimator;
  const auto p = static_cast<double>(beta_true.size());
  r.mse = (beta_hat - beta_true).squaredNorm() / p;
  double ape = 0.0;
  int nz = 0, z = 0, tp = 0, tn = 0;
  for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
    if (beta_true[j] != 0.0) {
      ++nz;
      ape += std::abs(beta_hat[j] - beta_true[j]) / std::abs(beta_true[j]);
      tp += beta_hat[j] != 0.0 ? 1 : 0;
    } else {
      ++z;
      tn += beta_hat[j] == 0.0 ? 1 : 0;
    }
  }
  if (nz > 0) {
    r.mape = ape / nz;
    r.tp_rate = static_cast<double>(tp) / nz;
  } else {
    warn("score: true vector is all zero, MAPE and TP are undefined");
  }
  r.tn_rate = z > 0 ? static_cast<double>(tn) / z : 1.0;
  return r;
}

double weak_coefficient_mse(const Vector& beta_hat, const Vector& beta_true, double fraction) {
  if (beta_hat.size() != beta_true.size()) throw Error("weak_coefficient_mse: vectors must be conformable");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("weak_coefficient_mse: fraction must lie in (0, 1]");
  std::vector<Eigen::Index> nz;
  for (Eigen::Index j = 0; j < beta_true.size(); ++j)
    if (beta_true[j] != 0.0) nz.push_back(j);
  if (nz.empty()) throw Error("weak_coefficient_mse: true vector has no nonzero entries");
  std::stable_sort(nz.begin(), nz.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(beta_true[a]) < std::abs(beta_true[b]); });
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(nz.size())));
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = beta_hat[nz[i]] - beta_true[nz[i]];
    acc += d * d;
  }
  return acc / static_cast<double>(m);
}

ReconstructionOutcome reconstruct_signal(const Vector& signal, const ReconstructionConfig& config) {
  if (!is_power_of_two(signal.size()) || signal.size() < 2) {
    throw Error("reconstruct: signal length must be a power of two, got " + std::to_string(signal.size()));
  }
  return reconstruct_coefficients(dwt(signal, config.basis), config);
}

ReconstructionOutcome reconstruct_coefficients(const Vector& coefficients, const ReconstructionConfig& config) {
  if (!is_power_of_two(coefficients.size()) || coefficients.size() < 2) {
    throw Error("reconstruct: length must be a power of two, got " + std::to_string(coefficients.size()));
  }
  ReconstructionOutcome out;
  out.coefficients = coefficients;
  const CompressedSample sample = compress_and_corrupt(out.coefficients, config.delta_prime, config.corruption,
                                                       config.seed);
  out.n = static_cast<int>(sample.X.rows());
  out.p = static_cast<int>(sample.X.cols());
  const ProblemInstance inst = sample.instance(out.coefficients);
  SuiteConfig suite = config.suite;
  suite.search.seed = derive_seed(config.seed, stream::kWeightSearch);
  const SuiteResult res = run_estimator_suite(inst, suite);
  for (const auto& e : res.outputs) {
    ReconstructedEstimate r;
    r.estimate = e;
    if (e.ok) {
      r.signal_hat = idwt(e.beta_hat, config.basis);
      r.report = score(e.beta_hat, out.coefficients, to_string(e.estimator));
      r.weak_mse = weak_coefficient_mse(e.beta_hat, out.coefficients);
    } else {
      r.report.estimator = to_string(e.estimator);
    }
    out.estimates.push_back(std::move(r));
  }
  return out;
}

SyntheticSignal synthetic_test_signal(int length, const WaveletBasis& basis, std::uint64_t seed) {
  if (!is_power_of_two(length) || length < 16) throw Error("synthetic signal length must be a power of two >= 16");
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector coef = Vector::Zero(length);
  const int coarse = length / 8;  // approximation and coarse details
  const int n_strong = std::max(2, length / 64);
  const int n_weak = std::max(2, length / 32);
  auto place = [&](int lo, int hi, int count, double mag_lo, double mag_hi) {
    std::vector<int> idx(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < std::min(count, hi - lo); ++i) {
      const double mag = mag_lo + (mag_hi - mag_lo) * unif(rng);
      coef[idx[i]] = unif(rng) < 0.5 ? -mag : mag;
    }
  };
  place(0, coarse, n_strong, 1.0, 3.0);
  place(coarse, length, n_weak, 0.05, 0.25);
  return {coef, idwt(coef, basis)};
}

}  // namespace ramp
