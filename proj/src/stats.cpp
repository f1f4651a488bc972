#include "ramp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

namespace ramp {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must lie in (0,1)");
  return boost::math::quantile(boost::math::normal(), p);
}

double mean(const Vector& x) {
  if (x.size() == 0) throw Error("mean of empty vector");
  return x.mean();
}

double sample_sd(const Vector& x) {
  if (x.size() < 2) throw Error("sample sd needs at least two values");
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

double quantile_type7(const Vector& x, double prob) {
  if (x.size() == 0) throw Error("quantile of empty vector");
  if (!(prob >= 0.0 && prob <= 1.0)) throw Error("quantile level must lie in [0,1]");
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double silverman_bandwidth(const Vector& x) {
  return 1.06 * sample_sd(x) * std::pow(static_cast<double>(x.size()), -0.2);
}

GaussianKde::GaussianKde(const Vector& data, double bandwidth)
    : sorted_(data.data(), data.data() + data.size()), h_(bandwidth) {
  if (!(h_ > 0.0)) throw Error("KDE bandwidth must be positive");
  if (sorted_.empty()) throw Error("KDE needs data");
  std::sort(sorted_.begin(), sorted_.end());
}

double GaussianKde::operator()(double x) const {
  constexpr double kCutoff = 9.0;
  auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x - kCutoff * h_);
  auto last = std::upper_bound(first, sorted_.end(), x + kCutoff * h_);
  double acc = 0.0;
  for (auto it = first; it != last; ++it) {
    const double u = (x - *it) / h_;
    acc += std::exp(-0.5 * u * u);
  }
  return acc / (static_cast<double>(sorted_.size()) * h_ * std::sqrt(2.0 * std::numbers::pi));
}

GaussianKernelCdf::GaussianKernelCdf(const Vector& data, double bandwidth)
    : sorted_(data.data(), data.data() + data.size()), h_(bandwidth) {
  if (!(h_ > 0.0)) throw Error("kernel CDF bandwidth must be positive");
  if (sorted_.empty()) throw Error("kernel CDF needs data");
  std::sort(sorted_.begin(), sorted_.end());
}

double GaussianKernelCdf::operator()(double t) const {
  constexpr double kCutoff = 9.0;
  auto first = std::lower_bound(sorted_.begin(), sorted_.end(), t - kCutoff * h_);
  auto last = std::upper_bound(first, sorted_.end(), t + kCutoff * h_);
  double acc = static_cast<double>(first - sorted_.begin());
  for (auto it = first; it != last; ++it) acc += normal_cdf((t - *it) / h_);
  return acc / static_cast<double>(sorted_.size());
}

double GaussianKernelCdf::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  constexpr double kCutoff = 9.0;
  auto first = std::lower_bound(sorted_.begin(), sorted_.end(), lo - kCutoff * h_);
  auto last = std::upper_bound(first, sorted_.end(), hi + kCutoff * h_);
  double acc = 0.0;
  for (auto it = first; it != last; ++it) {
    const double a = (lo - *it) / h_;
    const double b = (hi - *it) / h_;
    // take differences in the tail where both CDF values are small
    acc += (a > 0.0) ? normal_cdf(-a) - normal_cdf(-b) : normal_cdf(b) - normal_cdf(a);
  }
  return acc / static_cast<double>(sorted_.size());
}

EmpiricalCdf::EmpiricalCdf(const Vector& data) : sorted_(data.data(), data.data() + data.size()) {
  if (sorted_.empty()) throw Error("empirical cdf needs data");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

}  // namespace ramp
