#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ramp/common.hpp"

namespace ramp {

// h(l) = sum_{k<=l} w_k tau_k - sum_{k>l} w_k (1 - tau_k), l = 0..K.
std::vector<double> cumulative_weights(std::span<const double> taus, std::span<const double> w);

// rho_C(x) = sum_k w_k (x - u_k)(tau_k - 1{x <= u_k}) with strictly increasing levels and
// intercepts. K = 1 with w = 1 is the ordinary check loss.
class CompositeQuantileLoss {
 public:
  CompositeQuantileLoss(std::vector<double> taus, std::vector<double> intercepts,
                        std::vector<double> weights);
  static CompositeQuantileLoss single(double tau, double intercept = 0.0);

  std::size_t size() const { return taus_.size(); }
  const std::vector<double>& taus() const { return taus_; }
  const std::vector<double>& intercepts() const { return intercepts_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& h() const { return h_; }
  double score_bound() const;  // max(|h(0)|, |h(K)|)

 private:
  std::vector<double> taus_;
  std::vector<double> intercepts_;
  std::vector<double> weights_;
  std::vector<double> h_;
};

struct SquaredLoss {};

using Loss = std::variant<CompositeQuantileLoss, SquaredLoss>;

struct Interval {
  double lo;
  double hi;
};

// Location of z relative to the proximal bands of a composite quantile loss at scale b.
// Flat band l (1..K): prox(z) = u_l. Open band l (0..K): prox(z) = z - b h(l).
struct Band {
  int index;
  bool flat;
};
Band locate_band(const CompositeQuantileLoss& loss, double z, double b);

double loss_value(const Loss& loss, double x);
Interval subgradient(const Loss& loss, double x);
double prox(const Loss& loss, double z, double b);
double effective_score(const Loss& loss, double z, double b);
// Almost-everywhere derivative of the effective score in z.
double effective_score_slope(const Loss& loss, double z, double b);
double rescaled_score(const Loss& loss, double z, double b, double delta, double omega);
Vector rescaled_score(const Loss& loss, const Vector& z, double b, double delta, double omega);

}  // namespace ramp
