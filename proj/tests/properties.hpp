#pragma once

// Property checks shared by the unit tests (small sizes) and the acceptance run (full sizes).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ramp/amse.hpp"
#include "ramp/loss.hpp"
#include "ramp/model.hpp"
#include "ramp/pipeline.hpp"
#include "ramp/wavelet.hpp"
#include "ramp/weights.hpp"

namespace ramp_test {

using ramp::Matrix;
using ramp::Vector;

struct Check {
  bool pass = true;
  std::string detail;
};

inline std::vector<double> random_simplex(int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(k);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

// Random composite quantile loss with K in [1, 4].
inline ramp::CompositeQuantileLoss random_loss(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kd(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int K = kd(rng);
  std::vector<double> taus, u;
  while (static_cast<int>(taus.size()) < K) {
    const double t = 0.02 + 0.96 * unif(rng);
    if (std::none_of(taus.begin(), taus.end(), [&](double x) { return std::abs(x - t) < 1e-3; })) taus.push_back(t);
  }
  std::sort(taus.begin(), taus.end());
  double acc = -1.0 - unif(rng);
  for (int k = 0; k < K; ++k) u.push_back(acc += 0.05 + unif(rng));
  return ramp::CompositeQuantileLoss(taus, u, random_simplex(K, rng));
}

// Direct weighted-sum formula, independent of the library's branch structure.
inline double check_loss_direct(const ramp::CompositeQuantileLoss& l, double x) {
  double r = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double d = x - l.intercepts()[k];
    r += l.weights()[k] * d * (l.taus()[k] - (x <= l.intercepts()[k] ? 1.0 : 0.0));
  }
  return r;
}

// prox beats every point of a step-`step` grid on b rho(x) + (x - z)^2 / 2.
inline Check prox_grid_oracle(int cases, double step, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> zd(-3.0, 3.0), bd(0.05, 2.0);
  Check c;
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const auto loss = random_loss(rng);
    const double z = zd(rng), b = bd(rng);
    const double x = ramp::prox(ramp::Loss(loss), z, b);
    auto f = [&](double y) { return b * check_loss_direct(loss, y) + 0.5 * (y - z) * (y - z); };
    const double fx = f(x);
    const double reach = b * std::max(std::abs(loss.h().front()), std::abs(loss.h().back())) + 0.01;
    for (double y = z - reach; y <= z + reach; y += step) {
      const double margin = f(y) - fx;
      if (margin < worst) worst = margin;
    }
  }
  c.pass = worst >= -1e-10;
  std::ostringstream os;
  os << cases << " cases, worst margin " << worst;
  c.detail = os.str();
  return c;
}

// G~ = z - prox to 1e-12, plus monotone and 1-Lipschitz on sorted pairs.
inline Check score_identity(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> zd(-4.0, 4.0), bd(0.01, 3.0);
  double worst_id = 0.0, worst_lip = 0.0;
  for (int i = 0; i < cases; ++i) {
    const ramp::Loss loss = random_loss(rng);
    const double b = bd(rng);
    double z1 = zd(rng), z2 = zd(rng);
    if (z1 > z2) std::swap(z1, z2);
    for (double z : {z1, z2}) {
      worst_id = std::max(worst_id, std::abs(ramp::effective_score(loss, z, b) - (z - ramp::prox(loss, z, b))));
    }
    const double dg = ramp::effective_score(loss, z2, b) - ramp::effective_score(loss, z1, b);
    worst_lip = std::max({worst_lip, -dg, dg - (z2 - z1)});
  }
  Check c;
  c.pass = worst_id <= 1e-12 && worst_lip <= 1e-12;
  std::ostringstream os;
  os << cases << " cases, identity error " << worst_id << ", monotone/Lipschitz violation " << worst_lip;
  c.detail = os.str();
  return c;
}

// h(l) - h(l-1) = w_l and h nondecreasing.
inline Check h_telescoping(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  bool monotone = true;
  for (int i = 0; i < cases; ++i) {
    const auto loss = random_loss(rng);
    const auto& h = loss.h();
    for (std::size_t l = 1; l < h.size(); ++l) {
      worst = std::max(worst, std::abs((h[l] - h[l - 1]) - loss.weights()[l - 1]));
      monotone = monotone && h[l] >= h[l - 1];
    }
  }
  Check c;
  c.pass = worst <= 1e-15 && monotone;
  std::ostringstream os;
  os << cases << " losses, max telescoping error " << worst << (monotone ? "" : ", h not monotone");
  c.detail = os.str();
  return c;
}

inline Matrix random_psd(int K, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> rk(1, K);
  const int r = rk(rng);  // rank, so singular matrices occur too
  Matrix B(K, r);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < r; ++j) B(i, j) = nd(rng);
  Matrix S = B * B.transpose() / r;
  return 0.5 * (S + S.transpose());
}

// KKT on the simplex and dominance over random simplex points.
inline Check qp_kkt_dominance(int matrices, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kd(2, 6);
  double worst_kkt = 0.0, worst_dom = 0.0, worst_sum = 0.0;
  for (int m = 0; m < matrices; ++m) {
    const int K = kd(rng);
    ramp::SigmaMatrix S{random_psd(K, rng), ramp::SigmaKind::kStein};
    const Vector w = ramp::simplex_qp_weights(S).w;
    worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    for (int k = 0; k < K; ++k) worst_sum = std::max(worst_sum, -w[k]);
    const Vector g = 2.0 * S.entries * w;
    double common = 0.0;
    int active = 0;
    for (int k = 0; k < K; ++k)
      if (w[k] > 1e-12) common += g[k], ++active;
    common /= active;
    for (int k = 0; k < K; ++k) {
      if (w[k] > 1e-12) {
        worst_kkt = std::max(worst_kkt, std::abs(g[k] - common));
      } else {
        worst_kkt = std::max(worst_kkt, common - g[k]);
      }
    }
    const double fw = w.dot(S.entries * w);
    for (int i = 0; i < points; ++i) {
      const auto v = random_simplex(K, rng);
      const Vector vv = Eigen::Map<const Vector>(v.data(), K);
      worst_dom = std::max(worst_dom, fw - vv.dot(S.entries * vv));
    }
  }
  Check c;
  c.pass = worst_kkt <= 1e-8 && worst_dom <= 1e-12 && worst_sum <= 1e-10;
  std::ostringstream os;
  os << matrices << " matrices x " << points << " points: KKT " << worst_kkt << ", dominance " << worst_dom
     << ", simplex " << worst_sum;
  c.detail = os.str();
  return c;
}

// Residual of (1 + a^2) Phi(-a) - a phi(a) = delta / 2, evaluated with erfc.
inline Check alpha_min_residual() {
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double delta = i / 100.0;
    const double a = ramp::alpha_min_bound(delta);
    const double lhs =
        (1.0 + a * a) * 0.5 * std::erfc(a / std::numbers::sqrt2) - a * std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(lhs - 0.5 * delta));
  }
  Check c;
  c.pass = worst <= 1e-9;
  c.detail = "delta in {0.01,...,1}, max residual " + std::to_string(worst);
  return c;
}

inline Matrix dwt_matrix(int n, const ramp::WaveletBasis& basis) {
  Matrix W(n, n);
  for (int j = 0; j < n; ++j) W.col(j) = ramp::dwt(Vector::Unit(n, j), basis);
  return W;
}

// W'W = I for lengths 2..max_len, and idwt(dwt(x)) = x on random signals.
inline Check dwt_orthogonality(int max_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst_orth = 0.0, worst_rt = 0.0, worst_taps = 0.0;
  for (const auto& basis : {ramp::WaveletBasis::haar(), ramp::WaveletBasis::la8()}) {
    const Vector taps = Eigen::Map<const Vector>(basis.filter_taps.data(), basis.filter_taps.size());
    worst_taps = std::max(worst_taps, std::abs(taps.norm() - 1.0));
    for (int n = 2; n <= max_len; n *= 2) {
      const Matrix W = dwt_matrix(n, basis);
      worst_orth = std::max(worst_orth, (W.transpose() * W - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = nd(rng);
      worst_rt = std::max(worst_rt, (ramp::idwt(ramp::dwt(x, basis), basis) - x).cwiseAbs().maxCoeff());
    }
  }
  Check c;
  c.pass = worst_orth <= 1e-10 && worst_rt <= 1e-10 && worst_taps <= 1e-12;
  std::ostringstream os;
  os << "lengths 2.." << max_len << ": |W'W - I| " << worst_orth << ", round trip " << worst_rt << ", |taps| - 1 "
     << worst_taps;
  c.detail = os.str();
  return c;
}

// Debiased vectors beta + zeta_k Z_k with correlated Z; compares the replicate mean of the Stein
// matrix with the replicate mean of the oracle matrix, entrywise in units of the MC standard error.
struct SteinMc {
  Matrix mean_hat, mean_oracle, se;
  double worst_z = 0.0;
  double worst_rel = 0.0;
};

inline SteinMc stein_mc(int K, int p, int s, int reps, std::uint64_t seed) {
  const std::vector<double> zeta{0.3, 0.4, 0.5}, alpha{1.0, 1.5, 2.0};
  Matrix R(3, 3);
  R << 1.0, 0.5, 0.3, 0.5, 1.0, 0.6, 0.3, 0.6, 1.0;
  const Matrix L = Matrix(R.topLeftCorner(K, K)).llt().matrixL();
  Matrix cz(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) cz(a, b) = zeta[a] * zeta[b] * R(a, b);
  std::vector<double> thetas;
  for (int k = 0; k < K; ++k) thetas.push_back(alpha[k] * zeta[k]);

  const Vector beta = ramp::generate_coefficients(p, s, ramp::DistributionSpec::dirac_pm1(), seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> nd;
  Matrix sum_h = Matrix::Zero(K, K), sq_h = Matrix::Zero(K, K), sum_o = Matrix::Zero(K, K);
  Matrix E(p, K);
  for (int r = 0; r < reps; ++r) {
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < K; ++k) E(j, k) = nd(rng);
    const Matrix Z = E * L.transpose();
    std::vector<Vector> bt, bh;
    for (int k = 0; k < K; ++k) {
      bt.push_back(beta + zeta[k] * Z.col(k));
      bh.push_back(ramp::soft_threshold(bt.back(), thetas[k]));
    }
    const Matrix h = ramp::stein_sigma_hat(bt, thetas, cz).entries;
    sum_h += h;
    sq_h += h.cwiseProduct(h);
    sum_o += ramp::empirical_sigma_oracle(bh, beta).entries;
  }
  SteinMc out;
  out.mean_hat = sum_h / reps;
  out.mean_oracle = sum_o / reps;
  const Matrix var = (sq_h / reps - out.mean_hat.cwiseProduct(out.mean_hat)) * (reps / (reps - 1.0));
  out.se = (var / reps).cwiseSqrt();
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      const double d = std::abs(out.mean_hat(a, b) - out.mean_oracle(a, b));
      out.worst_z = std::max(out.worst_z, d / out.se(a, b));
      out.worst_rel = std::max(out.worst_rel, d / std::abs(out.mean_oracle(a, b)));
    }
  return out;
}

}  // namespace ramp_test
