#pragma once

#include <optional>

#include "ramp/common.hpp"
#include "ramp/distribution.hpp"

namespace ramp {

struct DesignSpec {
  int n = 0;
  int p = 0;
  double sigma_x = 0.0;  // Toeplitz base; 0 gives i.i.d. N(0, 1/n) entries
  std::uint64_t seed = 0;

  void validate() const;
};

// Y = X beta + eps. Immutable once assembled.
struct ProblemInstance {
  Matrix X;
  Vector Y;
  std::optional<Vector> beta_true;
  std::optional<Vector> errors;
  int n = 0;
  int p = 0;
  double delta = 0.0;
  std::optional<int> s_hint;
};

Matrix generate_design(const DesignSpec& spec);
Vector generate_coefficients(int p, int s, const DistributionSpec& dist, std::uint64_t seed);
Vector generate_errors(int n, const DistributionSpec& dist, std::uint64_t seed);

ProblemInstance assemble_instance(Matrix X, const Vector& beta, const Vector& eps);
// Observed data only; no truth attached.
ProblemInstance make_instance(Matrix X, Vector Y, std::optional<int> s_hint = std::nullopt);

}  // namespace ramp
