#include "ramp/distribution.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace ramp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Affine map from the raw law to the population law: x_law = (x_raw - shift) * scale.
struct Affine {
  double shift = 0.0;
  double scale = 1.0;
};

Affine law_affine(const DistributionSpec& spec) {
  if (!spec.target_sd) return {};
  const double sd = raw_sd(spec);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error("distribution " + spec.name() + " cannot be rescaled to a target sd");
  }
  return {raw_mean(spec), *spec.target_sd / sd};
}

double raw_density(const DistributionSpec& spec, double x) {
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) { return boost::math::pdf(boost::math::normal(g.mean, g.sd), x); },
          [&](const StudentT& t) { return boost::math::pdf(boost::math::students_t(t.df), x); },
          [&](const GaussianMixture& m) {
            double f = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i) {
              if (m.sds[i] <= 0.0) throw Error("mixture with point-mass component has no density");
              f += m.weights[i] * boost::math::pdf(boost::math::normal(m.means[i], m.sds[i]), x);
            }
            return f;
          },
          [&](const DiracPm1&) -> double { throw Error("dirac_pm1 has no density"); },
          [&](const PointMass&) -> double { throw Error("point_mass has no density"); },
      },
      spec.kind);
}

double raw_cdf(const DistributionSpec& spec, double x) {
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) {
            if (g.sd <= 0.0) return x >= g.mean ? 1.0 : 0.0;
            return boost::math::cdf(boost::math::normal(g.mean, g.sd), x);
          },
          [&](const StudentT& t) { return boost::math::cdf(boost::math::students_t(t.df), x); },
          [&](const GaussianMixture& m) {
            double c = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i) {
              if (m.sds[i] <= 0.0) {
                c += x >= m.means[i] ? m.weights[i] : 0.0;
              } else {
                c += m.weights[i] * boost::math::cdf(boost::math::normal(m.means[i], m.sds[i]), x);
              }
            }
            return c;
          },
          [&](const DiracPm1&) { return x < -1.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0); },
          [&](const PointMass& pm) { return x >= pm.value ? 1.0 : 0.0; },
      },
      spec.kind);
}

}  // namespace

void DistributionSpec::validate() const {
  std::visit(Overloaded{
                 [](const Gaussian& g) {
                   if (!(g.sd >= 0.0)) throw Error("gaussian sd must be nonnegative");
                 },
                 [](const StudentT& t) {
                   if (!(t.df > 0.0)) throw Error("student_t df must be positive");
                 },
                 [](const GaussianMixture& m) {
                   if (m.weights.empty() || m.weights.size() != m.means.size() ||
                       m.weights.size() != m.sds.size()) {
                     throw Error("mixture needs equally many weights, means and sds");
                   }
                   double total = 0.0;
                   for (std::size_t i = 0; i < m.weights.size(); ++i) {
                     if (m.weights[i] < 0.0) throw Error("mixture weights must be nonnegative");
                     if (m.sds[i] < 0.0) throw Error("mixture sds must be nonnegative");
                     total += m.weights[i];
                   }
                   if (std::abs(total - 1.0) > 1e-9) throw Error("mixture weights must sum to 1");
                 },
                 [](const DiracPm1&) {},
                 [](const PointMass&) {},
             },
             kind);
  if (target_sd && !(*target_sd > 0.0)) throw Error("target_sd must be positive");
}

std::string DistributionSpec::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Gaussian& g) { os << "gaussian(" << g.mean << "," << g.sd << ")"; },
                 [&](const StudentT& t) { os << "student_t(" << t.df << ")"; },
                 [&](const GaussianMixture& m) { os << "gaussian_mixture(K=" << m.weights.size() << ")"; },
                 [&](const DiracPm1&) { os << "dirac_pm1"; },
                 [&](const PointMass& pm) { os << "point_mass(" << pm.value << ")"; },
             },
             kind);
  if (target_sd) os << "[sd=" << *target_sd << "]";
  return os.str();
}

DistributionSpec DistributionSpec::gaussian(double mean, double sd) { return {Gaussian{mean, sd}, {}}; }
DistributionSpec DistributionSpec::student_t(double df) { return {StudentT{df}, {}}; }
DistributionSpec DistributionSpec::mixture(std::vector<double> weights, std::vector<double> means,
                                           std::vector<double> sds) {
  DistributionSpec d{GaussianMixture{std::move(weights), std::move(means), std::move(sds)}, {}};
  d.validate();
  return d;
}
DistributionSpec DistributionSpec::dirac_pm1() { return {DiracPm1{}, {}}; }
DistributionSpec DistributionSpec::point_mass(double value) { return {PointMass{value}, {}}; }

DistributionSpec DistributionSpec::with_target_sd(double sd) const {
  DistributionSpec d = *this;
  d.target_sd = sd;
  d.validate();
  return d;
}

double draw(const DistributionSpec& spec, Rng& rng) {
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) {
            if (g.sd == 0.0) return g.mean;
            return std::normal_distribution<double>(g.mean, g.sd)(rng);
          },
          [&](const StudentT& t) { return std::student_t_distribution<double>(t.df)(rng); },
          [&](const GaussianMixture& m) {
            const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            std::size_t i = 0;
            double acc = m.weights[0];
            while (u >= acc && i + 1 < m.weights.size()) acc += m.weights[++i];
            if (m.sds[i] == 0.0) return m.means[i];
            return std::normal_distribution<double>(m.means[i], m.sds[i])(rng);
          },
          [&](const DiracPm1&) { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0; },
          [&](const PointMass& pm) { return pm.value; },
      },
      spec.kind);
}

double raw_mean(const DistributionSpec& spec) {
  return std::visit(Overloaded{
                        [](const Gaussian& g) { return g.mean; },
                        [](const StudentT& t) {
                          return t.df > 1.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
                        },
                        [](const GaussianMixture& m) {
                          return std::inner_product(m.weights.begin(), m.weights.end(),
                                                    m.means.begin(), 0.0);
                        },
                        [](const DiracPm1&) { return 0.0; },
                        [](const PointMass& pm) { return pm.value; },
                    },
                    spec.kind);
}

double raw_sd(const DistributionSpec& spec) {
  return std::visit(Overloaded{
                        [](const Gaussian& g) { return g.sd; },
                        [](const StudentT& t) {
                          return t.df > 2.0 ? std::sqrt(t.df / (t.df - 2.0))
                                            : std::numeric_limits<double>::infinity();
                        },
                        [](const GaussianMixture& m) {
                          double mu = 0.0, second = 0.0;
                          for (std::size_t i = 0; i < m.weights.size(); ++i) {
                            mu += m.weights[i] * m.means[i];
                            second += m.weights[i] * (m.sds[i] * m.sds[i] + m.means[i] * m.means[i]);
                          }
                          return std::sqrt(std::max(0.0, second - mu * mu));
                        },
                        [](const DiracPm1&) { return 1.0; },
                        [](const PointMass&) { return 0.0; },
                    },
                    spec.kind);
}

bool has_density(const DistributionSpec& spec) {
  if (std::holds_alternative<Gaussian>(spec.kind)) return std::get<Gaussian>(spec.kind).sd > 0.0;
  if (std::holds_alternative<StudentT>(spec.kind)) return true;
  if (const auto* m = std::get_if<GaussianMixture>(&spec.kind)) {
    for (double sd : m->sds)
      if (sd <= 0.0) return false;
    return true;
  }
  return false;
}

double law_density(const DistributionSpec& spec, double x) {
  const Affine a = law_affine(spec);
  return raw_density(spec, x / a.scale + a.shift) / a.scale;
}

double law_cdf(const DistributionSpec& spec, double x) {
  const Affine a = law_affine(spec);
  return raw_cdf(spec, x / a.scale + a.shift);
}

double law_quantile(const DistributionSpec& spec, double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw Error("quantile level must lie in (0,1)");
  const Affine a = law_affine(spec);
  double raw = 0.0;
  if (const auto* g = std::get_if<Gaussian>(&spec.kind); g && g->sd > 0.0) {
    raw = boost::math::quantile(boost::math::normal(g->mean, g->sd), prob);
  } else if (const auto* t = std::get_if<StudentT>(&spec.kind)) {
    raw = boost::math::quantile(boost::math::students_t(t->df), prob);
  } else {
    // Generic bracketing bisection on the raw cdf; returns inf{x : F(x) >= prob}.
    double lo = -1.0, hi = 1.0;
    while (raw_cdf(spec, lo) >= prob) lo *= 2.0;
    while (raw_cdf(spec, hi) < prob) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
      const double mid = 0.5 * (lo + hi);
      (raw_cdf(spec, mid) >= prob ? hi : lo) = mid;
    }
    raw = hi;
  }
  return (raw - a.shift) * a.scale;
}

Vector sample_law(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  const Affine a = law_affine(spec);
  Vector out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = (draw(spec, rng) - a.shift) * a.scale;
  return out;
}

}  // namespace ramp
