#pragma once

#include <span>
#include <vector>

#include "ramp/common.hpp"

namespace ramp {

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double mean(const Vector& x);
// Sample standard deviation with the 1/(n-1) normalization.
double sample_sd(const Vector& x);

// Linear-interpolation sample quantile (Hyndman-Fan type 7).
double quantile_type7(const Vector& x, double prob);

// 1.06 * sd * n^(-1/5).
double silverman_bandwidth(const Vector& x);

// Gaussian-kernel density estimate over a sorted copy of the data; terms farther than
// 9 bandwidths from the evaluation point are skipped (each contributes < 1e-17 relative).
class GaussianKde {
 public:
  GaussianKde(const Vector& data, double bandwidth);
  double operator()(double x) const;
  double bandwidth() const { return h_; }

 private:
  std::vector<double> sorted_;
  double h_;
};

// n^{-1} sum_i Phi((t - x_i) / h), the CDF of the Gaussian KDE.
class GaussianKernelCdf {
 public:
  GaussianKernelCdf(const Vector& data, double bandwidth);
  double operator()(double t) const;
  // operator()(hi) - operator()(lo), computed without cancellation for narrow intervals.
  double mass(double lo, double hi) const;

 private:
  std::vector<double> sorted_;
  double h_;
};

// n^{-1} #{i : x_i <= t}.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const Vector& data);
  double operator()(double t) const;

 private:
  std::vector<double> sorted_;
};

}  // namespace ramp
