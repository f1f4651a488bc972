#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ramp/common.hpp"

namespace ramp {

struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
};

struct StudentT {
  double df = 3.0;
};

// Components with sd == 0 are point masses, which lets a mixture describe a sparse law
// such as (1 - w) * delta_0 + w/2 * delta_{-1} + w/2 * delta_{+1}.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;
};

struct DiracPm1 {};

struct PointMass {
  double value = 0.0;
};

struct DistributionSpec {
  std::variant<Gaussian, StudentT, GaussianMixture, DiracPm1, PointMass> kind = Gaussian{};
  std::optional<double> target_sd;

  void validate() const;
  std::string name() const;

  static DistributionSpec gaussian(double mean = 0.0, double sd = 1.0);
  static DistributionSpec student_t(double df);
  static DistributionSpec mixture(std::vector<double> weights, std::vector<double> means,
                                  std::vector<double> sds);
  static DistributionSpec dirac_pm1();
  static DistributionSpec point_mass(double value);
  DistributionSpec with_target_sd(double sd) const;
};

// Draw from the raw law (target_sd is applied by callers that rescale a whole sample).
double draw(const DistributionSpec& spec, Rng& rng);

// Population moments of the raw law.
double raw_mean(const DistributionSpec& spec);
double raw_sd(const DistributionSpec& spec);
bool has_density(const DistributionSpec& spec);

// The population law that a rescaled sample approximates: when target_sd is set the raw law is
// centered and scaled to that sd, otherwise it is the raw law itself.
double law_density(const DistributionSpec& spec, double x);
double law_cdf(const DistributionSpec& spec, double x);
double law_quantile(const DistributionSpec& spec, double prob);

// Monte Carlo sample of the population law above (no sample-level re-centering).
Vector sample_law(const DistributionSpec& spec, std::size_t n, Rng& rng);

}  // namespace ramp
