#pragma once

#include <string>
#include <vector>

#include "ramp/common.hpp"

namespace ramp {

enum class WaveletFamily { kHaar, kLa8 };

struct WaveletBasis {
  WaveletFamily family = WaveletFamily::kLa8;
  std::vector<double> filter_taps;  // low-pass (scaling) filter
  int levels = 0;                   // 0: full depth for the signal at hand

  static WaveletBasis haar();
  static WaveletBasis la8();  // least asymmetric, 8 vanishing moments, 16 taps
};

WaveletFamily parse_wavelet_family(const std::string& name);
std::string to_string(WaveletFamily family);

bool is_power_of_two(Eigen::Index n);

// Periodic orthonormal DWT. Output layout: [a_J, d_J, d_{J-1}, ..., d_1], coarsest first.
Vector dwt(const Vector& signal, const WaveletBasis& basis);
Vector idwt(const Vector& coeffs, const WaveletBasis& basis);

}  // namespace ramp
