#include "ramp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ramp/stats.hpp"

namespace ramp {

void DesignSpec::validate() const {
  if (n < 1 || p < 1) throw Error("design dimensions must be positive");
  if (!(sigma_x >= 0.0 && sigma_x < 1.0)) throw Error("sigma_x must lie in [0,1)");
  if (sigma_x > 0.0 && n < 2) throw Error("correlated design needs n >= 2 for column scaling");
}

Matrix generate_design(const DesignSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(spec.n));
  Matrix X(spec.n, spec.p);
  if (spec.sigma_x == 0.0) {
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.p; ++j) X(i, j) = normal(rng) * inv_sqrt_n;
    return X;
  }
  // Rows ~ N(0, Sigma) with Sigma_ij = r^|i-j|: a stationary AR(1) recursion along the row.
  const double r = spec.sigma_x;
  const double innovation = std::sqrt(1.0 - r * r);
  for (int i = 0; i < spec.n; ++i) {
    double prev = normal(rng);
    X(i, 0) = prev;
    for (int j = 1; j < spec.p; ++j) {
      prev = r * prev + innovation * normal(rng);
      X(i, j) = prev;
    }
  }
  for (int j = 0; j < spec.p; ++j) {
    auto col = X.col(j);
    col.array() -= col.mean();
    const double var = col.squaredNorm() / static_cast<double>(spec.n - 1);
    col *= inv_sqrt_n / std::sqrt(var);
  }
  return X;
}

Vector generate_coefficients(int p, int s, const DistributionSpec& dist, std::uint64_t seed) {
  if (p < 1) throw Error("p must be positive");
  if (s < 0 || s > p) throw Error("sparsity s must satisfy 0 <= s <= p");
  dist.validate();
  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first s slots become the support.
  for (int k = 0; k < s; ++k) {
    std::uniform_int_distribution<int> pick(k, p - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  Vector beta = Vector::Zero(p);
  for (int k = 0; k < s; ++k) {
    double v = 0.0;
    // A zero draw would silently lower ||beta||_0; redraw (probability zero for continuous laws).
    for (int attempt = 0; attempt < 1000 && v == 0.0; ++attempt) v = draw(dist, rng);
    if (v == 0.0) throw Error("coefficient distribution only produces zeros");
    beta[idx[static_cast<std::size_t>(k)]] = v;
  }
  return beta;
}

Vector generate_errors(int n, const DistributionSpec& dist, std::uint64_t seed) {
  if (n < 1) throw Error("n must be positive");
  dist.validate();
  if (dist.target_sd && n < 2) throw Error("rescaling errors to a target sd needs n >= 2");
  Rng rng(seed);
  Vector eps(n);
  for (int i = 0; i < n; ++i) eps[i] = draw(dist, rng);
  if (dist.target_sd) {
    eps.array() -= eps.mean();
    const double sd = sample_sd(eps);
    if (sd == 0.0) {
      warn("error sample has zero spread; rescaling to target sd skipped");
    } else {
      eps *= *dist.target_sd / sd;
    }
  }
  return eps;
}

ProblemInstance assemble_instance(Matrix X, const Vector& beta, const Vector& eps) {
  if (X.cols() != beta.size()) throw Error("design columns and coefficient length differ");
  if (X.rows() != eps.size()) throw Error("design rows and error length differ");
  if (X.rows() < 1 || X.cols() < 1) throw Error("empty design");
  ProblemInstance inst;
  inst.n = static_cast<int>(X.rows());
  inst.p = static_cast<int>(X.cols());
  inst.delta = static_cast<double>(inst.n) / static_cast<double>(inst.p);
  inst.Y = X * beta + eps;
  inst.X = std::move(X);
  inst.beta_true = beta;
  inst.errors = eps;
  inst.s_hint = static_cast<int>((beta.array() != 0.0).count());
  return inst;
}

ProblemInstance make_instance(Matrix X, Vector Y, std::optional<int> s_hint) {
  if (X.rows() != Y.size()) throw Error("design rows and response length differ");
  if (X.rows() < 1 || X.cols() < 1) throw Error("empty design");
  ProblemInstance inst;
  inst.n = static_cast<int>(X.rows());
  inst.p = static_cast<int>(X.cols());
  inst.delta = static_cast<double>(inst.n) / static_cast<double>(inst.p);
  inst.X = std::move(X);
  inst.Y = std::move(Y);
  inst.s_hint = s_hint;
  return inst;
}

}  // namespace ramp
