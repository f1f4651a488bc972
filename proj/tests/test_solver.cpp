#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ramp/model.hpp"
#include "ramp/pipeline.hpp"
#include "ramp/solver.hpp"

using namespace ramp;

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ProblemInstance noisy(int n, int p, int s, double sd, std::uint64_t seed, DistributionSpec coef = DistributionSpec::dirac_pm1()) {
  const Matrix X = generate_design({n, p, 0.0, derive_seed(seed, stream::kDesign)});
  const Vector b = generate_coefficients(p, s, coef, derive_seed(seed, stream::kCoefficients));
  const Vector e = sd > 0.0 ? generate_errors(n, DistributionSpec::gaussian().with_target_sd(sd), derive_seed(seed, stream::kErrors))
                            : Vector::Zero(n).eval();
  return assemble_instance(X, b, e);
}

Vector ols(const ProblemInstance& in) {
  return (in.X.transpose() * in.X).ldlt().solve(in.X.transpose() * in.Y);
}

}  // namespace

TEST_CASE("adjust_residuals") {
  Matrix X(3, 2);
  X << 1.0, 2.0, -1.0, 0.5, 0.0, 3.0;
  Vector beta(2);
  beta << 0.7, -0.2;
  const ProblemInstance in = assemble_instance(X, beta, Vector::Zero(3));

  // first iteration: no previous score
  const Vector z0 = adjust_residuals(in, Vector::Zero(2), Vector(), Vector(), 0.0, false);
  CHECK(z0 == in.Y);

  Vector now(2), prev(2), g(3);
  now << 0.5, 0.1;
  prev << 0.4, 0.0;
  const Vector plain = adjust_residuals(in, now, prev, Vector::Zero(3), 0.3, false);
  for (int i = 0; i < 3; ++i) CHECK(plain[i] == doctest::Approx(in.Y[i] - X(i, 0) * now[0] - X(i, 1) * now[1]));

  g << 0.2, -0.1, 0.05;
  const double theta = 0.6;
  // scalar transcription
  int count = 0;
  for (int j = 0; j < 2; ++j) {
    double pj = prev[j];
    for (int i = 0; i < 3; ++i) pj += X(i, j) * g[i];
    const double eta = pj > theta ? pj - theta : (pj < -theta ? pj + theta : 0.0);
    if (eta != 0.0) ++count;
  }
  CHECK(count == 1);
  const Vector z = adjust_residuals(in, now, prev, g, theta, false);
  for (int i = 0; i < 3; ++i) {
    double r = in.Y[i];
    for (int j = 0; j < 2; ++j) r -= X(i, j) * now[j];
    CHECK(z[i] == doctest::Approx(r + g[i] * count / 3.0).epsilon(1e-14));
  }
  // dense mode counts every coordinate
  const Vector zd = adjust_residuals(in, now, prev, g, theta, true);
  for (int i = 0; i < 3; ++i) CHECK(zd[i] == doctest::Approx(plain[i] + g[i] * 2.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(adjust_residuals(in, Vector::Zero(3), prev, g, theta, false), Error);
  CHECK_THROWS_AS(adjust_residuals(in, now, prev, Vector::Zero(2), theta, false), Error);
}

TEST_CASE("calibrate_b: squared loss closed form") {
  const Vector z = Vector::LinSpaced(10, -1.0, 1.0);
  // delta = 0.5, s/p = 0.1  ->  s/n = 0.2
  CHECK(calibrate_b(z, Loss(SquaredLoss{}), 20, 100, {}, std::nullopt) == doctest::Approx(0.25));
  CHECK_THROWS_AS(calibrate_b(z, Loss(SquaredLoss{}), 100, 100, {}, std::nullopt), Error);
  CHECK_THROWS_AS(calibrate_b(z, Loss(SquaredLoss{}), 0, 100, {}, std::nullopt), Error);
}

TEST_CASE("calibrate_b: median loss against the exact-density root") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  const int n = 200000;
  Vector z(n);
  for (auto& v : z) v = nd(rng);
  const Loss med = CompositeQuantileLoss::single(0.5);
  const BGrid grid;
  const double step = grid.max_multiplier * 1.0 / grid.n_points;

  for (double target : {0.1, 0.3, 0.5}) {
    auto rhs = [](double b) { return 2.0 * Phi(b / 2) - 1.0 - b * phi(b / 2); };
    double lo = 0.0, hi = 20.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      (rhs(m) < target ? lo : hi) = m;
    }
    const double root = 0.5 * (lo + hi);
    const int s = static_cast<int>(std::lround(target * n));
    const double b = calibrate_b(z, med, s, n, grid, std::nullopt, BCalibrationRule::kScoreEquation);
    CHECK(b > 0.0);
    CHECK(std::abs(b - root) <= step + 0.02);

    // flat-band count is exact under the unit-slope rule
    const double bu = calibrate_b(z, med, s, n, grid, std::nullopt, BCalibrationRule::kUnitSlope);
    const auto& c = std::get<CompositeQuantileLoss>(med);
    const double frac = empirical_flat_probability(z, c, bu);
    CHECK(std::abs(frac * n - s) <= 1.0);
  }
}

TEST_CASE("calibrate_b: failure carries the trace") {
  const Vector z = Vector::LinSpaced(50, -1.0, 1.0);
  const Loss med = CompositeQuantileLoss::single(0.5);
  BGrid tiny{0.01, 10};
  try {
    calibrate_b(z, med, 25, 50, tiny, std::nullopt, BCalibrationRule::kScoreEquation);
    FAIL("expected a calibration failure");
  } catch (const CalibrationError& e) {
    CHECK(e.grid().size() == 10);
    CHECK(e.rhs().size() == 10);
  }
  CHECK_THROWS_AS(calibrate_b(Vector::Constant(20, 1.0), med, 5, 20, {}, std::nullopt), Error);
}

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(2.0, 1.0) == 1.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), y = u(rng), t = std::abs(u(rng));
    CHECK(soft_threshold(x, 0.0) == x);
    CHECK(std::abs(soft_threshold(x, t) - soft_threshold(y, t)) <= std::abs(x - y) + 1e-15);
  }
  Vector v(3);
  v << -2.0, 0.1, 4.0;
  const Vector w = soft_threshold(v, 0.5);
  CHECK(w[0] == -1.5);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 3.5);
}

TEST_CASE("dense mode reproduces least squares") {
  const ProblemInstance in = noisy(200, 50, 50, 0.5, 4, DistributionSpec::gaussian());
  RampConfig cfg;
  cfg.dense_mode = true;
  cfg.max_iters = 500;
  cfg.tol = 1e-28;
  const RampResult r = run_single_ramp(in, Loss(SquaredLoss{}), cfg);
  CHECK((r.beta_hat - ols(in)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("sparse mode: noiseless squared loss recovers the truth") {
  const ProblemInstance in = noisy(250, 500, 5, 0.0, 5);
  RampConfig cfg;
  cfg.alpha = 1.5;
  cfg.max_iters = 300;
  cfg.tol = 1e-14;
  const RampResult r = run_single_ramp(in, Loss(SquaredLoss{}), cfg);
  CHECK((r.beta_hat - *in.beta_true).squaredNorm() / 500 <= 1e-4);
}

TEST_CASE("pure noise with a large threshold gives zero") {
  const ProblemInstance in = noisy(100, 200, 0, 1.0, 6);
  RampConfig cfg;
  cfg.alpha = 50.0;
  const RampResult r = run_single_ramp(in, Loss(CompositeQuantileLoss::single(0.5)), cfg);
  CHECK(r.beta_hat.isZero(0.0));
}

TEST_CASE("state-evolution value is the mean squared score; converged implies tolerance") {
  const ProblemInstance in = noisy(250, 500, 5, 0.2, 7);
  const auto law = DistributionSpec::gaussian().with_target_sd(0.2);
  std::vector<double> u;
  for (double t : {0.25, 0.5, 0.75}) u.push_back(law_quantile(law, t));
  const Loss loss = CompositeQuantileLoss({0.25, 0.5, 0.75}, u, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  RampConfig cfg;
  cfg.alpha = 2.0;
  cfg.max_iters = 100;
  const RampResult r = run_single_ramp(in, loss, cfg);
  CHECK(r.zeta_emp_sq == doctest::Approx(r.score.squaredNorm() / in.n).epsilon(1e-12));
  const double omega = static_cast<double>(r.sparsity_used) / in.p;
  const Vector g = rescaled_score(loss, r.z, r.b, in.delta, omega);
  CHECK((g - r.score).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()));
  CHECK(r.zeta_emp_sq_trace.back() == r.zeta_emp_sq);
  CHECK(r.theta == doctest::Approx(cfg.alpha * std::sqrt(r.zeta_emp_sq)));
  CHECK((soft_threshold(r.beta_tilde, r.theta) - r.beta_hat).cwiseAbs().maxCoeff() == 0.0);
  if (r.converged) CHECK(r.final_tol <= cfg.tol);
  CHECK(r.iterations_used <= cfg.max_iters);
}

TEST_CASE("lambda_from_alpha") {
  const auto zero = DistributionSpec::point_mass(0.0);
  const double a = 1.3, z = 0.4, b = 0.7, d = 0.5;
  CHECK(lambda_from_alpha(a, z, b, d, zero) == doctest::Approx(a * z / (b * d) * 2.0 * Phi(-a)).epsilon(1e-12));
  double last = lambda_from_alpha(1.0, z, b, d, zero);
  for (double al = 1.1; al <= 10.0; al += 0.1) {
    const double v = lambda_from_alpha(al, z, b, d, zero);
    CHECK(v < last);
    last = v;
  }
  CHECK(last < 1e-15);
  CHECK(lambda_from_alpha(a, 3.0 * z, b, d, zero) == doctest::Approx(3.0 * lambda_from_alpha(a, z, b, d, zero)).epsilon(1e-12));
  // closed form and Monte Carlo agree for a spike-and-slab law
  const auto mix = DistributionSpec::mixture({0.9, 0.1}, {0.0, 0.0}, {0.0, 2.0});
  const double exact = lambda_from_alpha(a, z, b, d, mix);
  const auto mix_sd = DistributionSpec::mixture({0.9, 0.1}, {0.0, 0.0}, {0.0, 2.0}).with_target_sd(std::sqrt(0.4));
  CHECK(lambda_from_alpha(a, z, b, d, mix_sd, 400000, 3) == doctest::Approx(exact).epsilon(0.02));
  CHECK_THROWS_AS(lambda_from_alpha(a, 0.0, b, d, zero), Error);
}

TEST_CASE("composite l1 oracle") {
  const ProblemInstance in = noisy(60, 20, 3, 0.3, 8);
  const Loss med = CompositeQuantileLoss::single(0.5);
  const L1OracleResult big = reference_composite_l1(in, med, 1e6);
  CHECK(big.beta.cwiseAbs().maxCoeff() <= 1e-8);

  const L1OracleResult ls = reference_composite_l1(in, Loss(SquaredLoss{}), 0.0);
  CHECK((ls.beta - ols(in)).cwiseAbs().maxCoeff() <= 1e-4);

  const ProblemInstance sp = noisy(100, 200, 3, 0.2, 9);
  RampConfig cfg;
  cfg.alpha = 2.0;
  cfg.support_multiplier = 1.0;
  cfg.monotone_sparsity = false;
  cfg.max_iters = 300;
  const RampResult r = run_single_ramp(sp, med, cfg);
  int nnz = 0;
  for (int j = 0; j < sp.p; ++j) nnz += r.beta_hat[j] != 0.0;
  const double lambda = r.theta * nnz / (sp.n * r.b);
  const L1OracleResult o = reference_composite_l1(sp, med, lambda);
  CHECK(o.objective <= composite_l1_objective(sp, med, lambda, r.beta_hat) + 1e-3);
  CHECK(o.objective == doctest::Approx(composite_l1_objective(sp, med, lambda, o.beta)).epsilon(1e-12));
  CHECK_THROWS_AS(reference_composite_l1(sp, med, -1.0), Error);
}
