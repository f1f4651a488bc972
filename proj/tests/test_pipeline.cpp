#include <doctest.h>

#include <cmath>
#include <numbers>

#include "properties.hpp"
#include "ramp/pipeline.hpp"
#include "ramp/suite.hpp"
#include "support.hpp"

using namespace ramp;

namespace {

double lhs(double a) {
  return (1.0 + a * a) * 0.5 * std::erfc(a / std::numbers::sqrt2) - a * std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
}

ProblemInstance instance(int n, int p, int s, std::uint64_t seed,
                         DistributionSpec errs = DistributionSpec::student_t(3).with_target_sd(0.2)) {
  return assemble_instance(generate_design({n, p, 0.0, derive_seed(seed, stream::kDesign)}),
                           generate_coefficients(p, s, DistributionSpec::dirac_pm1(), derive_seed(seed, stream::kCoefficients)),
                           generate_errors(n, errs, derive_seed(seed, stream::kErrors)));
}

}  // namespace

TEST_CASE("alpha_min bound") {
  CHECK(alpha_min_bound(1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(lhs(alpha_min_bound(0.5)) - 0.25) <= 1e-9);
  const auto res = ramp_test::alpha_min_residual();
  CHECK_MESSAGE(res.pass, res.detail);
  for (double a = 0.0; a < 5.0; a += 0.05) CHECK(lhs(a) > lhs(a + 0.05));
  CHECK_THROWS_AS(alpha_min_bound(0.0), Error);
  CHECK_THROWS_AS(alpha_min_bound(1.5), Error);
}

TEST_CASE("golden-section search on stub objectives") {
  const TuningConfig t = TuningConfig::simulation();
  auto quad = [](double a) {
    AlphaProbe p;
    p.objective = (a - 1.7) * (a - 1.7);
    return p;
  };
  const auto q = search_alpha(quad, 1.3, 2.3, t);
  CHECK(std::abs(q.alpha - 1.7) <= t.gs_tol);
  CHECK(static_cast<int>(q.probes.size()) <= golden_section_probe_bound(1.3, 2.3, t.gs_tol));

  auto down = [](double a) {
    AlphaProbe p;
    p.objective = -a;
    return p;
  };
  CHECK(std::abs(search_alpha(down, 1.3, 2.3, t).alpha - 2.3) <= t.gs_tol);

  // a failing region is skipped, a fully failing objective is an error
  auto partial = [](double a) -> AlphaProbe {
    if (a > 2.0) throw Error("diverged");
    AlphaProbe p;
    p.objective = -a;
    return p;
  };
  const auto pr = search_alpha(partial, 1.3, 2.3, t);
  CHECK(pr.alpha <= 2.0);
  CHECK(std::any_of(pr.probes.begin(), pr.probes.end(), [](const AlphaProbe& p) { return p.failed; }));
  auto never = [](double) -> AlphaProbe { throw Error("diverged"); };
  CHECK_THROWS_AS(search_alpha(never, 1.3, 2.3, t), Error);

  TuningConfig g;
  g.mode = CandidateMode::kGrid;
  g.grid = {1.0, 1.5, 1.75, 2.0};
  const auto gr = search_alpha(quad, 0.0, 0.0, g);
  CHECK(gr.alpha == 1.75);
  CHECK(gr.probes.size() == 4);
}

TEST_CASE("tune_alpha: golden section against an 11-point grid") {
  const ProblemInstance in = instance(250, 500, 5, 3);
  const Loss med = CompositeQuantileLoss::single(0.5, 0.0);
  const TuningConfig t = TuningConfig::simulation();
  const RampConfig rc;
  const TunedRun gs = tune_alpha(in, med, t, rc);
  TuningConfig g = t;
  g.mode = CandidateMode::kGrid;
  for (int i = 0; i <= 10; ++i) g.grid.push_back(1.3 + 0.1 * i);
  const TunedRun grid = tune_alpha(in, med, g, rc);
  double best = 1e300;
  for (const auto& p : grid.probes)
    if (!p.failed) best = std::min(best, p.objective);
  CHECK(gs.run.amse_hat <= best + 0.1 * std::abs(best));
  CHECK(gs.alpha >= 1.3 - 1e-12);
  CHECK(gs.alpha <= 2.3 + 1e-12);
  CHECK(gs.run.amse_hat == doctest::Approx(std::min_element(gs.probes.begin(), gs.probes.end(), [](auto& a, auto& b) {
                                             return (a.failed ? 1e300 : a.objective) < (b.failed ? 1e300 : b.objective);
                                           })->objective));
}

TEST_CASE("intercepts from residuals") {
  Vector r(5);
  r << 3.0, 1.0, 4.0, 1.5, 9.0;
  const std::vector<double> taus{0.25, 0.5, 0.75};
  const auto u = intercepts_from_residuals(r, taus);
  // type 7 on sorted (1, 1.5, 3, 4, 9): position tau * 4
  CHECK(u[0] == doctest::Approx(1.5));
  CHECK(u[1] == doctest::Approx(3.0));
  CHECK(u[2] == doctest::Approx(4.0));

  Vector ties(6);
  ties << 0.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  ramp_test::WarningCapture cap;
  const auto t = intercepts_from_residuals(ties, taus);
  CHECK(t[0] < t[1]);
  CHECK(t[1] < t[2]);
  CHECK(cap.saw("jitter"));
  CHECK_THROWS_AS(intercepts_from_residuals(Vector::Constant(5, 2.0), taus), Error);
}

TEST_CASE("estimate_intercepts recovers the error quantiles") {
  const double sd = 1.0;
  const int n = 4000;
  const ProblemInstance in = instance(n, 400, 4, 5, DistributionSpec::gaussian().with_target_sd(sd));
  const std::vector<double> taus{0.25, 0.5, 0.75};
  const auto est = estimate_intercepts(in, taus, {}, TuningConfig::simulation(), {});
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double z = law_quantile(DistributionSpec::gaussian(), taus[k]);
    const double se = std::sqrt(taus[k] * (1 - taus[k]) / n) / law_density(DistributionSpec::gaussian(), z);
    CHECK(std::abs(est.intercepts[k] - sd * z) <= 3.0 * se);
  }
  CHECK(std::is_sorted(est.intercepts.begin(), est.intercepts.end()));

  const std::vector<double> mid{0.5};
  InterceptInit single;
  single.method = InitMethod::kSingleQuantile;
  const auto m = estimate_intercepts(in, mid, single, TuningConfig::simulation(), {});
  CHECK(std::abs(m.intercepts[0]) <= 3.0 * std::sqrt(0.25 / n) / law_density(DistributionSpec::gaussian(), 0.0));
}

TEST_CASE("model_average") {
  const Vector a = (Vector(2) << 1.0, -2.0).finished(), b = (Vector(2) << 3.0, 0.0).finished();
  CHECK(model_average({a, b}, (Vector(2) << 1.0, 0.0).finished()) == a);
  CHECK(model_average({a, a}, (Vector(2) << 0.5, 0.5).finished()) == a);
  const Vector m = model_average({a, b}, (Vector(2) << 0.25, 0.75).finished());
  CHECK(m[0] == doctest::Approx(2.5));
  CHECK(m[1] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(model_average({a, b}, Vector::Ones(3)), Error);
}

TEST_CASE("K-parallel RAMP") {
  const ProblemInstance in = instance(250, 500, 5, 7);
  const auto law = DistributionSpec::student_t(3).with_target_sd(0.2);
  const std::vector<double> taus{0.25, 0.5, 0.75};
  std::vector<double> u;
  for (double t : taus) u.push_back(law_quantile(law, t));
  const TuningConfig tc = TuningConfig::simulation();
  const RampConfig rc;

  const PipelineResult r = k_parallel_ramp(in, taus, u, tc, rc);
  REQUIRE(r.components.size() == 3);
  CHECK(r.sigma_hat.size() == 3);
  CHECK((r.sigma_hat.entries - r.sigma_hat.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.weights.w.sum() == doctest::Approx(1.0));

  // support of the average within the union of supports
  for (int j = 0; j < in.p; ++j) {
    bool any = false;
    for (const auto& c : r.components) any = any || c.tuned.run.beta_hat[j] != 0.0;
    if (!any) CHECK(r.beta_ma[j] == 0.0);
  }
  // QP weights beat equal weights and every vertex on the Stein matrix
  const Matrix& S = r.sigma_hat.entries;
  const double f = r.weights.w.dot(S * r.weights.w);
  const Vector eq = Vector::Constant(3, 1.0 / 3);
  CHECK(f <= eq.dot(S * eq) + 1e-12);
  for (int k = 0; k < 3; ++k) CHECK(f <= S(k, k) + 1e-12);

  // thread count does not change anything
  PipelineOptions three;
  three.threads = 3;
  const PipelineResult r3 = k_parallel_ramp(in, taus, u, tc, rc, three);
  CHECK(r3.beta_ma == r.beta_ma);
  CHECK(r3.weights.w == r.weights.w);

  // K = 1 is one tuned run
  const std::vector<double> t1{0.5}, u1{u[1]};
  const PipelineResult one = k_parallel_ramp(in, t1, u1, tc, rc);
  const TunedRun direct = tune_alpha(in, CompositeQuantileLoss::single(0.5, u[1]), tc, rc);
  CHECK(one.beta_ma == direct.run.beta_hat);
  CHECK(one.alphas[0] == direct.alpha);

  // identical levels give identical components
  const std::vector<double> tt{0.5, 0.5}, uu{u[1], u[1]};
  const PipelineResult same = k_parallel_ramp(in, tt, uu, tc, rc);
  CHECK(same.components[0].tuned.run.beta_hat == same.components[1].tuned.run.beta_hat);
}

TEST_CASE("estimator suite") {
  const ProblemInstance in = instance(250, 500, 5, 9);
  SuiteConfig cfg = SuiteConfig::simulation();
  cfg.error_law = DistributionSpec::student_t(3).with_target_sd(0.2);
  const SuiteResult a = run_estimator_suite(in, cfg);
  REQUIRE(a.outputs.size() == all_estimators().size());
  for (const auto& o : a.outputs) {
    CHECK_MESSAGE(o.ok, to_string(o.estimator) << ": " << o.error);
    CHECK(o.beta_hat.size() == in.p);
    if (o.weights) CHECK(o.weights->sum() == doctest::Approx(1.0));
  }
  CHECK(std::is_sorted(a.intercepts.begin(), a.intercepts.end()));
  const SuiteResult b = run_estimator_suite(in, cfg);
  for (std::size_t i = 0; i < a.outputs.size(); ++i) CHECK(a.outputs[i].beta_hat == b.outputs[i].beta_hat);

  for (auto e : all_estimators()) CHECK(parse_estimator(to_string(e)) == e);
  CHECK_THROWS_AS(parse_estimator("nope"), Error);
}
