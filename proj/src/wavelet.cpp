#include "ramp/wavelet.hpp"

#include <cmath>

namespace ramp {

WaveletBasis WaveletBasis::haar() {
  WaveletBasis b;
  b.family = WaveletFamily::kHaar;
  b.filter_taps = {M_SQRT1_2, M_SQRT1_2};
  return b;
}

WaveletBasis WaveletBasis::la8() {
  WaveletBasis b;
  b.family = WaveletFamily::kLa8;
  // spectral factorization of the degree-7 Daubechies polynomial, least-asymmetric root set
  b.filter_taps = {
      -0.0033824159510050025955, -0.00054213233180001068935, 0.031695087811525991431,
      0.0076074873249766081919,  -0.14329423835127266284,    -0.061273359067811077843,
      0.48135965125905339159,    0.77718575169962802862,     0.36444189483617893676,
      -0.051945838107881800736,  -0.027219029917103486322,   0.049137179673730286787,
      0.0038087520138944894631,  -0.014952258337062199118,   -0.00030292051472413308126,
      0.0018899503327676891843,
  };
  return b;
}

WaveletFamily parse_wavelet_family(const std::string& name) {
  if (name == "haar") return WaveletFamily::kHaar;
  if (name == "la8" || name == "daubechies_la8" || name == "sym8") return WaveletFamily::kLa8;
  throw Error("unknown wavelet family '" + name + "' (expected haar or la8)");
}

std::string to_string(WaveletFamily family) { return family == WaveletFamily::kHaar ? "haar" : "daubechies_la8"; }

bool is_power_of_two(Eigen::Index n) { return n >= 1 && (n & (n - 1)) == 0; }

namespace {

int depth_for(Eigen::Index n, const WaveletBasis& basis) {
  if (!is_power_of_two(n)) throw Error("wavelet transform needs a power-of-two length, got " + std::to_string(n));
  if (basis.filter_taps.size() < 2 || basis.filter_taps.size() % 2 != 0) throw Error("wavelet filter must have even length");
  int full = 0;
  while ((Eigen::Index{1} << full) < n) ++full;
  if (basis.levels < 0) throw Error("wavelet levels must be nonnegative");
  if (basis.levels == 0) return full;
  if (basis.levels > full) throw Error("wavelet levels exceed log2 of the signal length");
  return basis.levels;
}

// g_k = (-1)^k h_{L-1-k}
std::vector<double> high_pass(const std::vector<double>& h) {
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t k = 0; k < L; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - k];
  return g;
}

}  // namespace

Vector dwt(const Vector& signal, const WaveletBasis& basis) {
  const Eigen::Index n = signal.size();
  const int levels = depth_for(n, basis);
  const auto& h = basis.filter_taps;
  const auto g = high_pass(h);
  const auto L = static_cast<Eigen::Index>(h.size());
  Vector out = signal;
  Vector approx = signal;
  Eigen::Index len = n;
  for (int j = 0; j < levels; ++j) {
    const Eigen::Index half = len / 2;
    Vector a = Vector::Zero(half), d = Vector::Zero(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      for (Eigen::Index k = 0; k < L; ++k) {
        const double x = approx[(2 * i + k) % len];
        a[i] += h[k] * x;
        d[i] += g[k] * x;
      }
    }
    out.segment(half, half) = d;
    approx = a;
    len = half;
  }
  out.head(len) = approx;
  return out;
}

Vector idwt(const Vector& coeffs, const WaveletBasis& basis) {
  const Eigen::Index n = coeffs.size();
  const int levels = depth_for(n, basis);
  const auto& h = basis.filter_taps;
  const auto g = high_pass(h);
  const auto L = static_cast<Eigen::Index>(h.size());
  Eigen::Index len = n >> levels;
  Vector approx = coeffs.head(len);
  for (int j = 0; j < levels; ++j) {
    const Eigen::Index full = 2 * len;
    const Vector d = coeffs.segment(len, len);
    Vector x = Vector::Zero(full);
    for (Eigen::Index i = 0; i < len; ++i) {
      for (Eigen::Index k = 0; k < L; ++k) x[(2 * i + k) % full] += h[k] * approx[i] + g[k] * d[i];
    }
    approx = std::move(x);
    len = full;
  }
  return approx;
}

}  // namespace ramp
