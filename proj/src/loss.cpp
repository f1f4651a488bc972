#include "ramp/loss.hpp"

#include <algorithm>
#include <cmath>

namespace ramp {

std::vector<double> cumulative_weights(std::span<const double> taus, std::span<const double> w) {
  if (taus.size() != w.size() || taus.empty()) throw Error("taus and weights must match and be nonempty");
  const std::size_t K = taus.size();
  std::vector<double> h(K + 1);
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t k = 0; k < K; ++k) upper += w[k] * (1.0 - taus[k]);
  h[0] = -upper;
  for (std::size_t l = 1; l <= K; ++l) {
    lower += w[l - 1] * taus[l - 1];
    upper -= w[l - 1] * (1.0 - taus[l - 1]);
    h[l] = lower - upper;
  }
  return h;
}

CompositeQuantileLoss::CompositeQuantileLoss(std::vector<double> taus, std::vector<double> intercepts,
                                             std::vector<double> weights)
    : taus_(std::move(taus)), intercepts_(std::move(intercepts)), weights_(std::move(weights)) {
  const std::size_t K = taus_.size();
  if (K == 0 || intercepts_.size() != K || weights_.size() != K) {
    throw Error("composite quantile loss needs K taus, intercepts and weights");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (!(taus_[k] > 0.0 && taus_[k] < 1.0)) throw Error("quantile levels must lie in (0,1)");
    if (!(weights_[k] >= 0.0 && weights_[k] <= 1.0)) throw Error("loss weights must lie in [0,1]");
    if (k > 0 && !(taus_[k] > taus_[k - 1])) throw Error("quantile levels must be strictly increasing");
    if (k > 0 && !(intercepts_[k] > intercepts_[k - 1])) {
      throw Error("intercepts must be strictly increasing");
    }
    total += weights_[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("loss weights must sum to 1");
  h_ = cumulative_weights(taus_, weights_);
}

CompositeQuantileLoss CompositeQuantileLoss::single(double tau, double intercept) {
  return CompositeQuantileLoss({tau}, {intercept}, {1.0});
}

double CompositeQuantileLoss::score_bound() const { return std::max(std::abs(h_.front()), std::abs(h_.back())); }

Band locate_band(const CompositeQuantileLoss& loss, double z, double b) {
  const auto& u = loss.intercepts();
  const auto& h = loss.h();
  const int K = static_cast<int>(u.size());
  // Left edges u_l + b h(l-1) are strictly increasing in l; binary search on them.
  int lo = 0, hi = K;  // count of left edges <= z
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (u[mid] + b * h[mid] <= z) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  const int l = lo;
  if (l == 0) return {0, false};
  const double left = u[l - 1] + b * h[l - 1];
  const double right = u[l - 1] + b * h[l];
  if (z == left) return {l - 1, false};
  if (z < right) return {l, true};
  return {l, false};
}

namespace {

const CompositeQuantileLoss* as_cq(const Loss& loss) { return std::get_if<CompositeQuantileLoss>(&loss); }

void check_b(double b) {
  if (!(b > 0.0)) throw Error("proximal scale b must be positive");
}

}  // namespace

double loss_value(const Loss& loss, double x) {
  const auto* cq = as_cq(loss);
  if (!cq) return 0.5 * x * x;
  const auto& u = cq->intercepts();
  const auto& tau = cq->taus();
  const auto& w = cq->weights();
  const std::size_t K = u.size();
  if (x < u.front()) {
    double v = 0.0;
    for (std::size_t k = 0; k < K; ++k) v += w[k] * (1.0 - tau[k]) * (u[k] - x);
    return v;
  }
  if (x >= u.back()) {
    double v = 0.0;
    for (std::size_t k = 0; k < K; ++k) v += w[k] * tau[k] * (x - u[k]);
    return v;
  }
  // x in [u_l, u_{l+1}) for some l in 1..K-1
  const std::size_t l = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), x) - u.begin());
  double v = 0.0;
  for (std::size_t k = 0; k < l; ++k) v += w[k] * tau[k] * std::abs(x - u[k]);
  for (std::size_t k = l; k < K; ++k) v += w[k] * (1.0 - tau[k]) * std::abs(x - u[k]);
  return v;
}

Interval subgradient(const Loss& loss, double x) {
  const auto* cq = as_cq(loss);
  if (!cq) return {x, x};
  const auto& u = cq->intercepts();
  const auto& h = cq->h();
  const auto it = std::lower_bound(u.begin(), u.end(), x);
  const auto l = static_cast<std::size_t>(it - u.begin());
  if (it != u.end() && *it == x) return {h[l], h[l + 1]};
  return {h[l], h[l]};
}

double prox(const Loss& loss, double z, double b) {
  check_b(b);
  const auto* cq = as_cq(loss);
  if (!cq) return z / (1.0 + b);
  const Band band = locate_band(*cq, z, b);
  if (band.flat) return cq->intercepts()[static_cast<std::size_t>(band.index - 1)];
  return z - b * cq->h()[static_cast<std::size_t>(band.index)];
}

double effective_score(const Loss& loss, double z, double b) {
  check_b(b);
  const auto* cq = as_cq(loss);
  if (!cq) return b * z / (1.0 + b);
  const Band band = locate_band(*cq, z, b);
  if (band.flat) return z - cq->intercepts()[static_cast<std::size_t>(band.index - 1)];
  return b * cq->h()[static_cast<std::size_t>(band.index)];
}

double effective_score_slope(const Loss& loss, double z, double b) {
  check_b(b);
  const auto* cq = as_cq(loss);
  if (!cq) return b / (1.0 + b);
  return locate_band(*cq, z, b).flat ? 1.0 : 0.0;
}

double rescaled_score(const Loss& loss, double z, double b, double delta, double omega) {
  if (!(delta > 0.0)) throw Error("delta must be positive");
  if (!(omega > 0.0)) throw Error("omega must be positive");
  return delta / omega * effective_score(loss, z, b);
}

Vector rescaled_score(const Loss& loss, const Vector& z, double b, double delta, double omega) {
  if (!(delta > 0.0)) throw Error("delta must be positive");
  if (!(omega > 0.0)) throw Error("omega must be positive");
  check_b(b);
  const double scale = delta / omega;
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = scale * effective_score(loss, z[i], b);
  return out;
}

}  // namespace ramp
