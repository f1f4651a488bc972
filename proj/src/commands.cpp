#include "ramp/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include "ramp/model.hpp"

namespace ramp {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::kSimulate: return "simulate";
    case Command::kEstimate: return "estimate";
    case Command::kStateEvolution: return "state-evolution";
    case Command::kReconstruct: return "reconstruct";
  }
  return "unknown";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::kSimulate, Command::kEstimate, Command::kStateEvolution, Command::kReconstruct})
    if (to_string(c) == s) return c;
  throw Error("unknown command '" + s + "'");
}

RunManifest RunManifest::resolved() const {
  RunManifest m = *this;
  if (!m.table_tag.empty() && m.table_tag != m.simulation.table_tag) {
    m.simulation = SimulationConfig::from_tag(m.table_tag);
  }
  m.simulation.seed = m.seed;
  m.simulation.replicates = m.replicates;
  m.simulation.threads = m.threads;

  m.estimate.suite.ramp.seed = derive_seed(m.seed, stream::kMonteCarlo);
  m.estimate.suite.search.seed = derive_seed(m.seed, stream::kWeightSearch);
  m.estimate.suite.pipeline.threads = m.threads;

  m.state_evolution.options.seed = m.seed;

  m.reconstruct.config.seed = m.seed;
  m.reconstruct.config.suite.pipeline.threads = m.threads;
  return m;
}

void RunManifest::validate() const {
  if (output_dir.empty()) throw Error("manifest: output_dir must not be empty");
  if (replicates < 1) throw Error("manifest: replicates must be at least 1");
  if (threads < 1) throw Error("manifest: threads must be at least 1");
  switch (command) {
    case Command::kSimulate:
      simulation.validate();
      break;
    case Command::kEstimate:
      if (estimate.x_path.empty() || estimate.y_path.empty()) throw Error("manifest: estimate needs x_path and y_path");
      if (estimate.suite.estimators.empty()) throw Error("manifest: no estimators requested");
      break;
    case Command::kStateEvolution: {
      const auto& se = state_evolution;
      if (!(se.delta > 0.0) || !(se.omega > 0.0)) throw Error("manifest: delta and omega must be positive");
      if (se.loss != "composite" && se.loss != "squared") throw Error("manifest: loss must be composite or squared");
      se.errors.validate();
      if (se.instance) {
        if (se.instance->p < 2 || se.instance->s < 0 || se.instance->s > se.instance->p) {
          throw Error("manifest: state-evolution instance needs p >= 2 and 0 <= s <= p");
        }
        if (std::lround(se.delta * se.instance->p) < 2) throw Error("manifest: instance has fewer than two rows");
      }
      break;
    }
    case Command::kReconstruct:
      if (reconstruct.signal_path.empty() &&
          (!is_power_of_two(reconstruct.synthetic_length) || reconstruct.synthetic_length < 16)) {
        throw Error("manifest: synthetic_length must be a power of two >= 16");
      }
      if (reconstruct.config.suite.estimators.empty()) throw Error("manifest: no estimators requested");
      break;
  }
}

// manifest JSON

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw Error(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(what + ": unknown key '" + key + "'");
  }
}

template <class T>
void get_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

Json estimate_json(const EstimateSpec& e) {
  return Json{{"x_path", e.x_path},
              {"y_path", e.y_path},
              {"s_hint", e.s_hint ? Json(*e.s_hint) : Json(nullptr)},
              {"suite", e.suite}};
}

void estimate_from(const Json& j, EstimateSpec& e) {
  check_keys(j, {"x_path", "y_path", "s_hint", "suite"}, "estimate");
  get_opt(j, "x_path", e.x_path);
  get_opt(j, "y_path", e.y_path);
  if (j.contains("s_hint")) {
    if (j.at("s_hint").is_null()) {
      e.s_hint.reset();
    } else {
      e.s_hint = j.at("s_hint").get<int>();
    }
  }
  get_opt(j, "suite", e.suite);
}

Json se_json(const StateEvolutionSpec& s) {
  Json inst = nullptr;
  if (s.instance) {
    inst = Json{{"p", s.instance->p}, {"s", s.instance->s}, {"coefficients", s.instance->coefficients},
                {"ramp", s.instance->ramp}};
  }
  return Json{{"loss", s.loss},       {"taus", s.taus},   {"weights", s.weights}, {"intercepts", s.intercepts},
              {"errors", s.errors},   {"delta", s.delta}, {"omega", s.omega},     {"options", s.options},
              {"instance", inst}};
}

void se_from(const Json& j, StateEvolutionSpec& s) {
  check_keys(j, {"loss", "taus", "weights", "intercepts", "errors", "delta", "omega", "options", "instance"},
             "state_evolution");
  get_opt(j, "loss", s.loss);
  get_opt(j, "taus", s.taus);
  get_opt(j, "weights", s.weights);
  get_opt(j, "intercepts", s.intercepts);
  get_opt(j, "errors", s.errors);
  get_opt(j, "delta", s.delta);
  get_opt(j, "omega", s.omega);
  get_opt(j, "options", s.options);
  if (j.contains("instance")) {
    const Json& ji = j.at("instance");
    if (ji.is_null()) {
      s.instance.reset();
    } else {
      check_keys(ji, {"p", "s", "coefficients", "ramp"}, "state_evolution.instance");
      SeInstanceSpec inst = s.instance.value_or(SeInstanceSpec{});
      get_opt(ji, "p", inst.p);
      get_opt(ji, "s", inst.s);
      get_opt(ji, "coefficients", inst.coefficients);
      get_opt(ji, "ramp", inst.ramp);
      s.instance = inst;
    }
  }
}

Json reconstruct_json(const ReconstructSpec& r) {
  return Json{{"signal_path", r.signal_path}, {"synthetic_length", r.synthetic_length}, {"config", r.config}};
}

void reconstruct_from(const Json& j, ReconstructSpec& r) {
  check_keys(j, {"signal_path", "synthetic_length", "config"}, "reconstruct");
  get_opt(j, "signal_path", r.signal_path);
  get_opt(j, "synthetic_length", r.synthetic_length);
  get_opt(j, "config", r.config);
}

}  // namespace

void to_json(Json& j, const RunManifest& m) {
  j = Json{{"command", to_string(m.command)},
           {"seed", m.seed},
           {"output_dir", m.output_dir},
           {"replicates", m.replicates},
           {"threads", m.threads},
           {"table_tag", m.table_tag},
           {"simulation", m.simulation},
           {"estimate", estimate_json(m.estimate)},
           {"state_evolution", se_json(m.state_evolution)},
           {"reconstruct", reconstruct_json(m.reconstruct)}};
}

void from_json(const Json& j, RunManifest& m) {
  check_keys(j,
             {"command", "seed", "output_dir", "replicates", "threads", "table_tag", "simulation", "estimate",
              "state_evolution", "reconstruct"},
             "manifest");
  if (j.contains("command")) m.command = parse_command(j.at("command").get<std::string>());
  get_opt(j, "seed", m.seed);
  get_opt(j, "output_dir", m.output_dir);
  get_opt(j, "replicates", m.replicates);
  get_opt(j, "threads", m.threads);
  get_opt(j, "table_tag", m.table_tag);
  get_opt(j, "simulation", m.simulation);
  if (j.contains("estimate")) estimate_from(j.at("estimate"), m.estimate);
  if (j.contains("state_evolution")) se_from(j.at("state_evolution"), m.state_evolution);
  if (j.contains("reconstruct")) reconstruct_from(j.at("reconstruct"), m.reconstruct);
}

// commands

namespace {

fs::path prepare(const RunManifest& m) {
  const fs::path out(m.output_dir);
  fs::create_directories(out);
  write_json(out / "manifest.json", Json(m));
  return out;
}

Json run_json(const RampResult& r) {
  return Json{{"converged", r.converged},
              {"iterations", r.iterations_used},
              {"theta", r.theta},
              {"b", r.b},
              {"zeta_emp_sq", r.zeta_emp_sq},
              {"amse_hat", r.amse_hat},
              {"final_tol", r.final_tol},
              {"sparsity_used", r.sparsity_used},
              {"zeta_emp_sq_trace", r.zeta_emp_sq_trace},
              {"b_trace", r.b_trace},
              {"tol_trace", r.tol_trace},
              {"support_trace", r.support_trace}};
}

Json output_json(const EstimateOutput& o) {
  Json j{{"estimator", to_string(o.estimator)},
         {"ok", o.ok},
         {"error", o.error},
         {"converged", o.converged},
         {"iterations", o.iterations},
         {"alpha", std::isfinite(o.alpha) ? Json(o.alpha) : Json(nullptr)},
         {"amse_hat", o.amse_hat}};
  j["weights"] = o.weights ? vector_json(*o.weights) : Json(nullptr);
  return j;
}

Json suite_json(const SuiteResult& res) {
  Json j;
  j["intercepts"] = res.intercepts;
  j["densities"] = res.densities;
  Json outs = Json::array();
  for (const auto& o : res.outputs) outs.push_back(output_json(o));
  j["estimates"] = outs;
  if (res.model_average) {
    const PipelineResult& pr = *res.model_average;
    Json comps = Json::array();
    for (const auto& c : pr.components) {
      Json cj{{"tau", c.tau}, {"intercept", c.intercept}, {"ok", c.ok}, {"error", c.error}};
      if (c.ok) {
        cj["alpha"] = c.tuned.alpha;
        cj["run"] = run_json(c.tuned.run);
        Json probes = Json::array();
        for (const auto& p : c.tuned.probes) {
          probes.push_back(Json{{"alpha", p.alpha},
                                {"objective", std::isfinite(p.objective) ? Json(p.objective) : Json(nullptr)},
                                {"converged", p.converged},
                                {"failed", p.failed}});
        }
        cj["alpha_probes"] = probes;
      }
      comps.push_back(cj);
    }
    j["model_average"] = Json{{"components", comps},
                              {"used", pr.used},
                              {"sigma_hat", matrix_json(pr.sigma_hat.entries)},
                              {"weights", vector_json(pr.weights.w)},
                              {"all_converged", pr.all_converged}};
  }
  if (res.search) {
    j["composite_search"] = Json{{"weights", vector_json(res.search->weights.w)},
                                 {"alpha", res.composite_alpha},
                                 {"rounds_run", res.search->rounds_run},
                                 {"probes", res.search->probes.size()},
                                 {"best_run", run_json(res.search->best_run)}};
  }
  return j;
}

bool all_ok(const std::vector<EstimateOutput>& outs, std::size_t expected) {
  if (outs.size() != expected) return false;
  for (const auto& o : outs)
    if (!o.ok) return false;
  return true;
}

// Sparse coefficient law (1 - w) delta_0 + w B for the state-evolution coupling.
DistributionSpec sparse_law(const DistributionSpec& nonzero, double w) {
  if (std::holds_alternative<DiracPm1>(nonzero.kind)) {
    return DistributionSpec::mixture({1.0 - w, 0.5 * w, 0.5 * w}, {0.0, -1.0, 1.0}, {0.0, 0.0, 0.0});
  }
  if (const auto* g = std::get_if<Gaussian>(&nonzero.kind); g && !nonzero.target_sd) {
    return DistributionSpec::mixture({1.0 - w, w}, {0.0, g->mean}, {0.0, g->sd});
  }
  throw Error("state evolution: give options.coefficient_law explicitly for nonzeros " + nonzero.name());
}

}  // namespace

Loss state_evolution_loss(const StateEvolutionSpec& spec) {
  if (spec.loss == "squared") return SquaredLoss{};
  const std::size_t K = spec.taus.size();
  std::vector<double> w = spec.weights.empty() ? std::vector<double>(K, 1.0 / static_cast<double>(K)) : spec.weights;
  std::vector<double> u = spec.intercepts;
  if (u.empty())
    for (double t : spec.taus) u.push_back(law_quantile(spec.errors, t));
  if (w.size() != K || u.size() != K) throw Error("state evolution: taus, weights and intercepts differ in length");
  return CompositeQuantileLoss(spec.taus, u, w);
}

int cmd_simulate(const RunManifest& manifest) {
  const RunManifest m = manifest.resolved();
  m.validate();
  const fs::path out = prepare(m);
  const SimulationResult r = run_simulation(m.simulation);
  write_csv(out / "summary.csv", summary_table(r));
  write_csv(out / "replicates.csv", replicate_table(r));
  const int tag_table = table_number(m.simulation.table_tag);
  for (int t = 1; t <= 5; ++t) {
    if (tag_table != 0 && t != tag_table) continue;
    const CsvTable tab = simulation_table(r, t);
    const bool empty = (t == 1 || t == 2 || t == 3) ? tab.header.size() <= 1 : tab.rows.empty();
    if (!empty) write_csv(out / ("table" + std::to_string(t) + ".csv"), tab);
  }
  Json reps = Json::array();
  std::size_t failures = 0;
  for (const auto& rep : r.replicates) {
    Json rj{{"replicate", rep.replicate}, {"seed", rep.seed}, {"intercepts", rep.intercepts}};
    rj["ma_weights"] = rep.ma_weights.size() ? vector_json(rep.ma_weights) : Json(nullptr);
    rj["c_weights"] = rep.c_weights.size() ? vector_json(rep.c_weights) : Json(nullptr);
    Json errs = Json::object();
    for (const auto& e : rep.records)
      if (!e.ok) errs[to_string(e.estimator)] = e.error;
    failures += m.simulation.suite.estimators.size();
    for (const auto& e : rep.records) failures -= e.ok ? 1 : 0;
    rj["errors"] = errs;
    reps.push_back(rj);
  }
  write_json(out / "report.json", Json{{"replicates", reps}});
  if (failures > 0) {
    std::cerr << "simulate: " << failures << " estimator runs produced no result\n";
    return 3;
  }
  return 0;
}

int cmd_estimate(const RunManifest& manifest) {
  const RunManifest m = manifest.resolved();
  m.validate();
  Matrix X = read_matrix_csv(m.estimate.x_path);
  Vector Y = read_vector_csv(m.estimate.y_path);
  if (X.rows() != Y.size()) {
    throw Error("estimate: X has " + std::to_string(X.rows()) + " rows but Y has " + std::to_string(Y.size()) +
                " entries");
  }
  const fs::path out = prepare(m);
  const ProblemInstance inst = make_instance(std::move(X), std::move(Y), m.estimate.s_hint);
  const SuiteResult res = run_estimator_suite(inst, m.estimate.suite);

  CsvTable coef;
  for (int j = 0; j < inst.p; ++j) coef.header.push_back("beta_" + std::to_string(j + 1));
  Json order = Json::array();
  for (const auto& o : res.outputs) {
    if (!o.ok) continue;
    order.push_back(to_string(o.estimator));
    std::vector<std::string> row;
    for (int j = 0; j < inst.p; ++j) row.push_back(format_double(o.beta_hat[j]));
    coef.add_row(std::move(row));
  }
  write_csv(out / "coefficients.csv", coef);
  Json report = suite_json(res);
  report["coefficient_rows"] = order;
  report["n"] = inst.n;
  report["p"] = inst.p;
  write_json(out / "report.json", report);
  if (!all_ok(res.outputs, m.estimate.suite.estimators.size())) {
    std::cerr << "estimate: some estimators produced no result (see report.json)\n";
    return 3;
  }
  return 0;
}

int cmd_state_evolution(const RunManifest& manifest) {
  const RunManifest m = manifest.resolved();
  m.validate();
  const StateEvolutionSpec& se = m.state_evolution;
  const fs::path out = prepare(m);
  const Loss loss = state_evolution_loss(se);
  StateEvolutionOptions opts = se.options;
  if (se.instance && !opts.coefficient_law && opts.coupling != SeCoupling::kLiteral &&
      opts.coupling != SeCoupling::kDense) {
    opts.coefficient_law = sparse_law(se.instance->coefficients,
                                      static_cast<double>(se.instance->s) / static_cast<double>(se.instance->p));
  }
  const StateEvolutionPoint pt = fixed_point_state_evolution(loss, se.errors, se.delta, se.omega, opts);
  Json report;
  report["fixed_point"] = Json{{"zeta_sq", pt.zeta_sq},         {"sigma_sq", pt.sigma_sq},
                               {"b", pt.b},                     {"converged", pt.converged},
                               {"iterations", pt.iterations},   {"zeta_sq_trace", pt.zeta_sq_trace}};
  report["warnings"] = Json::array();
  if (!pt.converged) report["warnings"].push_back("Monte Carlo fixed-point iteration did not converge");

  if (se.instance) {
    const SeInstanceSpec& is = *se.instance;
    const int p = is.p;
    const int n = static_cast<int>(std::lround(se.delta * p));
    Matrix X = generate_design(DesignSpec{n, p, 0.0, derive_seed(m.seed, stream::kDesign)});
    const Vector beta = generate_coefficients(p, is.s, is.coefficients, derive_seed(m.seed, stream::kCoefficients));
    const Vector eps = generate_errors(n, se.errors, derive_seed(m.seed, stream::kErrors));
    const ProblemInstance inst = assemble_instance(std::move(X), beta, eps);
    RampConfig rc = is.ramp;
    rc.sparsity_mode = SparsityMode::kFixed;
    rc.sparsity = std::max(1, static_cast<int>(std::lround(se.omega * p)));
    rc.alpha = opts.alpha;
    rc.b_rule = opts.b_rule;
    rc.seed = derive_seed(m.seed, stream::kMonteCarlo);
    const RampResult r = run_single_ramp(inst, loss, rc);
    Json ej = run_json(r);
    ej["n"] = n;
    ej["p"] = p;
    ej["relative_difference"] = r.zeta_emp_sq / pt.zeta_sq - 1.0;
    report["empirical"] = ej;
  }
  write_json(out / "state_evolution.json", report);
  if (!pt.converged) std::cerr << "warning: state evolution did not converge within max_iters\n";
  return 0;
}

int cmd_reconstruct(const RunManifest& manifest) {
  const RunManifest m = manifest.resolved();
  m.validate();
  const ReconstructSpec& rs = m.reconstruct;
  Vector signal;
  std::optional<Vector> exact;
  if (!rs.signal_path.empty()) {
    signal = read_vector_csv(rs.signal_path);
    if (!is_power_of_two(signal.size()) || signal.size() < 2) {
      throw Error("reconstruct: signal length must be a power of two, got " + std::to_string(signal.size()));
    }
  } else {
    const SyntheticSignal syn =
        synthetic_test_signal(rs.synthetic_length, rs.config.basis, derive_seed(m.seed, stream::kCoefficients));
    signal = syn.signal;
    exact = syn.coefficients;
  }
  const fs::path out = prepare(m);
  const ReconstructionOutcome res =
      exact ? reconstruct_coefficients(*exact, rs.config) : reconstruct_signal(signal, rs.config);
  write_vector_csv(out / "signal.csv", signal, "signal");
  write_vector_csv(out / "coefficients.csv", res.coefficients, "coefficient");
  write_csv(out / "report.csv", reconstruction_table(res));
  Json outs = Json::array();
  std::vector<EstimateOutput> raw;
  for (const auto& e : res.estimates) {
    raw.push_back(e.estimate);
    outs.push_back(output_json(e.estimate));
    if (!e.estimate.ok) continue;
    const std::string name = to_string(e.estimate.estimator);
    write_vector_csv(out / ("signal_hat_" + name + ".csv"), e.signal_hat, "signal_hat");
    write_vector_csv(out / ("coefficients_hat_" + name + ".csv"), e.estimate.beta_hat, "coefficient_hat");
  }
  write_json(out / "report.json", Json{{"n", res.n}, {"p", res.p}, {"estimates", outs}});
  if (!all_ok(raw, rs.config.suite.estimators.size())) {
    std::cerr << "reconstruct: some estimators produced no result (see report.json)\n";
    return 3;
  }
  return 0;
}

int run_command(const RunManifest& manifest) {
  switch (manifest.command) {
    case Command::kSimulate: return cmd_simulate(manifest);
    case Command::kEstimate: return cmd_estimate(manifest);
    case Command::kStateEvolution: return cmd_state_evolution(manifest);
    case Command::kReconstruct: return cmd_reconstruct(manifest);
  }
  throw Error("unknown command");
}

}  // namespace ramp
