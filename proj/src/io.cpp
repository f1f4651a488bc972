#include "ramp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace ramp {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

void CsvTable::add_row(const std::string& label, const std::vector<double>& values) {
  std::vector<std::string> row{label};
  for (double v : values) row.push_back(format_double(v));
  rows.push_back(std::move(row));
}

namespace {

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  std::string t = s.substr(a, b - a + 1);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

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

template <class T>
void get_opt(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  ensure_parent(path);
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  auto put = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  };
  if (!table.header.empty()) put(table.header);
  for (const auto& r : table.rows) {
    if (!table.header.empty() && r.size() != table.header.size()) {
      throw Error("write_csv: row width differs from header in " + path.string());
    }
    put(r);
  }
  if (!os) throw Error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    lines.push_back(split_line(line));
  }
  if (lines.empty()) throw Error(path.string() + ": empty CSV");
  const std::size_t width = lines.front().size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].size() != width) {
      throw Error(path.string() + ": ragged CSV, line " + std::to_string(i + 1) + " has " +
                  std::to_string(lines[i].size()) + " fields, expected " + std::to_string(width));
    }
  }
  CsvTable t;
  bool header = false;
  double dummy = 0.0;
  for (const auto& f : lines.front()) header = header || !parse_number(f, dummy);
  std::size_t start = 0;
  if (header) {
    t.header = lines.front();
    start = 1;
  }
  for (std::size_t i = start; i < lines.size(); ++i) t.rows.push_back(lines[i]);
  return t;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw Error(path.string() + ": no data rows");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto p = static_cast<Eigen::Index>(t.rows.front().size());
  Matrix M(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const std::string& f = t.rows[i][j];
      if (!parse_number(f, M(i, j)) || !std::isfinite(M(i, j))) {
        throw Error(path.string() + ": bad numeric field '" + f + "' at row " + std::to_string(i + 1) + ", column " +
                    std::to_string(j + 1));
      }
    }
  }
  return M;
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const Matrix M = read_matrix_csv(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw Error(path.string() + ": expected a single column or a single row");
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v, const std::string& column) {
  CsvTable t;
  t.header = {column};
  for (Eigen::Index i = 0; i < v.size(); ++i) t.rows.push_back({format_double(v[i])});
  write_csv(path, t);
}

void write_json(const std::filesystem::path& path, const Json& j) {
  ensure_parent(path);
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// enum names

#define RAMP_ENUM_NAMES(Type, parse_fn, ...)                                   \
  namespace {                                                                  \
  const std::vector<std::pair<Type, std::string>>& names_##parse_fn() {        \
    static const std::vector<std::pair<Type, std::string>> v{__VA_ARGS__};     \
    return v;                                                                  \
  }                                                                            \
  }                                                                            \
  std::string to_string(Type x) {                                              \
    for (const auto& [k, s] : names_##parse_fn())                              \
      if (k == x) return s;                                                    \
    return "unknown";                                                          \
  }                                                                            \
  Type parse_fn(const std::string& s) {                                        \
    for (const auto& [k, name] : names_##parse_fn())                           \
      if (name == s) return k;                                                 \
    throw Error("unknown " #Type " '" + s + "'");                              \
  }

RAMP_ENUM_NAMES(SparsityMode, parse_sparsity_mode, {SparsityMode::kFromInstance, "from_instance"},
                {SparsityMode::kFixed, "fixed"}, {SparsityMode::kSupport, "support"})
RAMP_ENUM_NAMES(BCalibrationRule, parse_b_rule, {BCalibrationRule::kScoreEquation, "score_equation"},
                {BCalibrationRule::kUnitSlope, "unit_slope"},
                {BCalibrationRule::kUnitSlopeSmoothed, "unit_slope_smoothed"})
RAMP_ENUM_NAMES(CandidateMode, parse_candidate_mode, {CandidateMode::kGoldenSection, "golden_section"},
                {CandidateMode::kGrid, "grid"})
RAMP_ENUM_NAMES(CrossZetaRule, parse_cross_zeta, {CrossZetaRule::kSampleCovariance, "sample_covariance"},
                {CrossZetaRule::kStateEvolutionDiagonal, "state_evolution_diagonal"},
                {CrossZetaRule::kScoreProduct, "score_product"})
RAMP_ENUM_NAMES(InitMethod, parse_init_method, {InitMethod::kLassoAmp, "lasso_amp"},
                {InitMethod::kSingleQuantile, "single_quantile"})
RAMP_ENUM_NAMES(SeCoupling, parse_coupling, {SeCoupling::kAuto, "auto"}, {SeCoupling::kLiteral, "literal"},
                {SeCoupling::kDense, "dense"}, {SeCoupling::kSparse, "sparse"})

#undef RAMP_ENUM_NAMES

// distributions

void to_json(Json& j, const DistributionSpec& d) {
  j = Json::object();
  if (const auto* g = std::get_if<Gaussian>(&d.kind)) {
    j["kind"] = "gaussian";
    j["mean"] = g->mean;
    j["sd"] = g->sd;
  } else if (const auto* t = std::get_if<StudentT>(&d.kind)) {
    j["kind"] = "student_t";
    j["df"] = t->df;
  } else if (const auto* m = std::get_if<GaussianMixture>(&d.kind)) {
    j["kind"] = "gaussian_mixture";
    j["weights"] = m->weights;
    j["means"] = m->means;
    j["sds"] = m->sds;
  } else if (std::holds_alternative<DiracPm1>(d.kind)) {
    j["kind"] = "dirac_pm1";
  } else if (const auto* pm = std::get_if<PointMass>(&d.kind)) {
    j["kind"] = "point_mass";
    j["value"] = pm->value;
  }
  j["target_sd"] = opt_json(d.target_sd);
}

void from_json(const Json& j, DistributionSpec& d) {
  check_keys(j, {"kind", "mean", "sd", "df", "weights", "means", "sds", "value", "target_sd"}, "distribution");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    d = DistributionSpec::gaussian(j.value("mean", 0.0), j.value("sd", 1.0));
  } else if (kind == "student_t") {
    d = DistributionSpec::student_t(j.at("df").get<double>());
  } else if (kind == "gaussian_mixture") {
    d = DistributionSpec::mixture(j.at("weights").get<std::vector<double>>(), j.at("means").get<std::vector<double>>(),
                                  j.at("sds").get<std::vector<double>>());
  } else if (kind == "dirac_pm1") {
    d = DistributionSpec::dirac_pm1();
  } else if (kind == "point_mass") {
    d = DistributionSpec::point_mass(j.value("value", 0.0));
  } else {
    throw Error("unknown distribution kind '" + kind + "'");
  }
  get_opt(j, "target_sd", d.target_sd);
  d.validate();
}

// configs

void to_json(Json& j, const BGrid& g) { j = Json{{"max_multiplier", g.max_multiplier}, {"n_points", g.n_points}}; }

void from_json(const Json& j, BGrid& g) {
  check_keys(j, {"max_multiplier", "n_points"}, "b_grid");
  get_opt(j, "max_multiplier", g.max_multiplier);
  get_opt(j, "n_points", g.n_points);
}

void to_json(Json& j, const RampConfig& c) {
  j = Json{{"alpha", c.alpha},
           {"max_iters", c.max_iters},
           {"tol", c.tol},
           {"sparsity_mode", to_string(c.sparsity_mode)},
           {"sparsity", c.sparsity},
           {"support_multiplier", c.support_multiplier},
           {"monotone_sparsity", c.monotone_sparsity},
           {"b_grid", c.b_grid},
           {"kde_bandwidth", opt_json(c.kde_bandwidth)},
           {"dense_mode", c.dense_mode},
           {"b_rule", to_string(c.b_rule)},
           {"seed", c.seed}};
}

void from_json(const Json& j, RampConfig& c) {
  check_keys(j,
             {"alpha", "max_iters", "tol", "sparsity_mode", "sparsity", "support_multiplier", "monotone_sparsity",
              "b_grid", "kde_bandwidth", "dense_mode", "b_rule", "seed"},
             "ramp");
  get_opt(j, "alpha", c.alpha);
  get_opt(j, "max_iters", c.max_iters);
  get_opt(j, "tol", c.tol);
  if (j.contains("sparsity_mode")) c.sparsity_mode = parse_sparsity_mode(j.at("sparsity_mode").get<std::string>());
  get_opt(j, "sparsity", c.sparsity);
  get_opt(j, "support_multiplier", c.support_multiplier);
  get_opt(j, "monotone_sparsity", c.monotone_sparsity);
  get_opt(j, "b_grid", c.b_grid);
  get_opt(j, "kde_bandwidth", c.kde_bandwidth);
  get_opt(j, "dense_mode", c.dense_mode);
  if (j.contains("b_rule")) c.b_rule = parse_b_rule(j.at("b_rule").get<std::string>());
  get_opt(j, "seed", c.seed);
}

void to_json(Json& j, const TuningConfig& c) {
  j = Json{{"alpha_min", opt_json(c.alpha_min)},
           {"alpha_max", c.alpha_max},
           {"gs_tol", c.gs_tol},
           {"mode", to_string(c.mode)},
           {"grid", c.grid}};
}

void from_json(const Json& j, TuningConfig& c) {
  check_keys(j, {"alpha_min", "alpha_max", "gs_tol", "mode", "grid"}, "tuning");
  get_opt(j, "alpha_min", c.alpha_min);
  get_opt(j, "alpha_max", c.alpha_max);
  get_opt(j, "gs_tol", c.gs_tol);
  if (j.contains("mode")) c.mode = parse_candidate_mode(j.at("mode").get<std::string>());
  get_opt(j, "grid", c.grid);
}

void to_json(Json& j, const WeightSearchConfig& c) {
  j = Json{{"rounds", c.rounds}, {"n_candidates", c.n_candidates}, {"grid_step", c.grid_step}, {"seed", c.seed}};
}

void from_json(const Json& j, WeightSearchConfig& c) {
  check_keys(j, {"rounds", "n_candidates", "grid_step", "seed"}, "search");
  get_opt(j, "rounds", c.rounds);
  get_opt(j, "n_candidates", c.n_candidates);
  get_opt(j, "grid_step", c.grid_step);
  get_opt(j, "seed", c.seed);
}

void to_json(Json& j, const PipelineOptions& c) {
  j = Json{{"cross_zeta", to_string(c.cross_zeta)}, {"threads", c.threads}};
}

void from_json(const Json& j, PipelineOptions& c) {
  check_keys(j, {"cross_zeta", "threads"}, "pipeline");
  if (j.contains("cross_zeta")) c.cross_zeta = parse_cross_zeta(j.at("cross_zeta").get<std::string>());
  get_opt(j, "threads", c.threads);
}

void to_json(Json& j, const InterceptInit& c) { j = Json{{"method", to_string(c.method)}, {"tau", c.tau}}; }

void from_json(const Json& j, InterceptInit& c) {
  check_keys(j, {"method", "tau"}, "init");
  if (j.contains("method")) c.method = parse_init_method(j.at("method").get<std::string>());
  get_opt(j, "tau", c.tau);
}

void to_json(Json& j, const SuiteConfig& c) {
  std::vector<std::string> est;
  for (Estimator e : c.estimators) est.push_back(to_string(e));
  j = Json{{"taus", c.taus},
           {"tuning", c.tuning},
           {"ramp", c.ramp},
           {"search", c.search},
           {"pipeline", c.pipeline},
           {"init", c.init},
           {"estimators", est},
           {"error_law", c.error_law ? Json(*c.error_law) : Json(nullptr)}};
}

void from_json(const Json& j, SuiteConfig& c) {
  check_keys(j, {"taus", "tuning", "ramp", "search", "pipeline", "init", "estimators", "error_law"}, "suite");
  get_opt(j, "taus", c.taus);
  get_opt(j, "tuning", c.tuning);
  get_opt(j, "ramp", c.ramp);
  get_opt(j, "search", c.search);
  get_opt(j, "pipeline", c.pipeline);
  get_opt(j, "init", c.init);
  if (j.contains("estimators")) {
    c.estimators.clear();
    for (const auto& s : j.at("estimators")) c.estimators.push_back(parse_estimator(s.get<std::string>()));
  }
  get_opt(j, "error_law", c.error_law);
}

void to_json(Json& j, const SimulationConfig& c) {
  j = Json{{"n", c.n},
           {"p", c.p},
           {"s", c.s},
           {"sigma_x", c.sigma_x},
           {"coefficients", c.coefficients},
           {"errors", c.errors},
           {"replicates", c.replicates},
           {"seed", c.seed},
           {"threads", c.threads},
           {"suite", c.suite},
           {"oracle_densities", c.oracle_densities},
           {"table_tag", c.table_tag}};
}

void from_json(const Json& j, SimulationConfig& c) {
  check_keys(j,
             {"n", "p", "s", "sigma_x", "coefficients", "errors", "replicates", "seed", "threads", "suite",
              "oracle_densities", "table_tag"},
             "simulation");
  // a tag sets the preset, explicit fields then override it
  if (j.contains("table_tag") && !j.at("table_tag").get<std::string>().empty()) {
    c = SimulationConfig::from_tag(j.at("table_tag").get<std::string>());
  }
  get_opt(j, "n", c.n);
  get_opt(j, "p", c.p);
  get_opt(j, "s", c.s);
  get_opt(j, "sigma_x", c.sigma_x);
  get_opt(j, "coefficients", c.coefficients);
  get_opt(j, "errors", c.errors);
  get_opt(j, "replicates", c.replicates);
  get_opt(j, "seed", c.seed);
  get_opt(j, "threads", c.threads);
  get_opt(j, "suite", c.suite);
  get_opt(j, "oracle_densities", c.oracle_densities);
  get_opt(j, "table_tag", c.table_tag);
}

void to_json(Json& j, const WaveletBasis& b) {
  j = Json{{"family", to_string(b.family)}, {"levels", b.levels}};
}

void from_json(const Json& j, WaveletBasis& b) {
  check_keys(j, {"family", "levels"}, "basis");
  if (j.contains("family")) {
    b = parse_wavelet_family(j.at("family").get<std::string>()) == WaveletFamily::kHaar ? WaveletBasis::haar()
                                                                                       : WaveletBasis::la8();
  }
  get_opt(j, "levels", b.levels);
}

void to_json(Json& j, const ReconstructionConfig& c) {
  j = Json{{"basis", c.basis},
           {"delta_prime", c.delta_prime},
           {"corruption", c.corruption},
           {"seed", c.seed},
           {"suite", c.suite}};
}

void from_json(const Json& j, ReconstructionConfig& c) {
  check_keys(j, {"basis", "delta_prime", "corruption", "seed", "suite"}, "reconstruction");
  get_opt(j, "basis", c.basis);
  get_opt(j, "delta_prime", c.delta_prime);
  get_opt(j, "corruption", c.corruption);
  get_opt(j, "seed", c.seed);
  get_opt(j, "suite", c.suite);
}

void to_json(Json& j, const StateEvolutionOptions& o) {
  j = Json{{"mc_samples", o.mc_samples},
           {"max_iters", o.max_iters},
           {"ftol", o.ftol},
           {"seed", o.seed},
           {"coupling", to_string(o.coupling)},
           {"coefficient_law", o.coefficient_law ? Json(*o.coefficient_law) : Json(nullptr)},
           {"alpha", o.alpha},
           {"b_rule", to_string(o.b_rule)},
           {"b_grid", o.b_grid}};
}

void from_json(const Json& j, StateEvolutionOptions& o) {
  check_keys(j, {"mc_samples", "max_iters", "ftol", "seed", "coupling", "coefficient_law", "alpha", "b_rule", "b_grid"},
             "state_evolution options");
  get_opt(j, "mc_samples", o.mc_samples);
  get_opt(j, "max_iters", o.max_iters);
  get_opt(j, "ftol", o.ftol);
  get_opt(j, "seed", o.seed);
  if (j.contains("coupling")) o.coupling = parse_coupling(j.at("coupling").get<std::string>());
  get_opt(j, "coefficient_law", o.coefficient_law);
  get_opt(j, "alpha", o.alpha);
  if (j.contains("b_rule")) o.b_rule = parse_b_rule(j.at("b_rule").get<std::string>());
  get_opt(j, "b_grid", o.b_grid);
}

Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

// tables

namespace {

std::vector<const EstimatorSummary*> present(const SimulationResult& r, const std::vector<Estimator>& wanted) {
  std::vector<const EstimatorSummary*> out;
  for (Estimator e : wanted)
    if (const auto* s = r.find(e)) out.push_back(s);
  return out;
}

std::vector<Estimator> order_of(const SimulationResult& r) {
  std::vector<Estimator> v;
  for (const auto& s : r.summary) v.push_back(s.estimator);
  return v;
}

CsvTable parts_table(const std::vector<const EstimatorSummary*>& cols) {
  CsvTable t;
  t.header = {"part"};
  for (const auto* s : cols) t.header.push_back(to_string(s->estimator));
  std::vector<double> nz, z, full;
  for (const auto* s : cols) {
    nz.push_back(s->mse_nonzero);
    z.push_back(s->mse_zero);
    full.push_back(s->mse_full);
  }
  t.add_row("nonzero", nz);
  t.add_row("zero", z);
  t.add_row("full", full);
  return t;
}

}  // namespace

CsvTable simulation_table(const SimulationResult& result, int table) {
  switch (table) {
    case 1:
      return parts_table(present(result, {Estimator::kMaW1, Estimator::kMaW2, Estimator::kMaEq, Estimator::kLasso}));
    case 3:
      return parts_table(present(
          result, {Estimator::kCW1, Estimator::kCW2, Estimator::kCEq, Estimator::kLasso, Estimator::kMedian}));
    case 2: {
      CsvTable t;
      t.header = {"rate"};
      std::vector<double> tp, tn;
      for (const auto* s : present(result, order_of(result))) {
        t.header.push_back(to_string(s->estimator));
        tp.push_back(s->tp);
        tn.push_back(s->tn);
      }
      t.add_row("tp", tp);
      t.add_row("tn", tn);
      return t;
    }
    case 4: {
      CsvTable t;
      t.header = {"estimator", "sigma_x", "s", "mse_nonzero", "mse_zero", "mse_full", "tp", "tn", "convergence_pct"};
      for (const auto* s : present(result, order_of(result))) {
        t.add_row({to_string(s->estimator), format_double(result.config.sigma_x), std::to_string(result.config.s),
                   format_double(s->mse_nonzero), format_double(s->mse_zero), format_double(s->mse_full),
                   format_double(s->tp), format_double(s->tn), format_double(s->convergence_pct)});
      }
      return t;
    }
    case 5: {
      CsvTable t;
      t.header = {"estimator", "convergence_pct"};
      for (const auto* s : present(result, order_of(result)))
        t.add_row({to_string(s->estimator), format_double(s->convergence_pct)});
      return t;
    }
    default:
      throw Error("no table layout " + std::to_string(table));
  }
}

CsvTable summary_table(const SimulationResult& result) {
  CsvTable t;
  t.header = {"estimator", "n_ok",  "mse_nonzero", "mse_zero",       "mse_full",
              "mse_full_sd", "tp", "tn",          "convergence_pct"};
  for (const auto& s : result.summary) {
    t.add_row({to_string(s.estimator), std::to_string(s.n_ok), format_double(s.mse_nonzero),
               format_double(s.mse_zero), format_double(s.mse_full), format_double(s.mse_full_sd), format_double(s.tp),
               format_double(s.tn), format_double(s.convergence_pct)});
  }
  return t;
}

CsvTable replicate_table(const SimulationResult& result) {
  CsvTable t;
  t.header = {"replicate", "seed", "estimator", "ok", "mse_nonzero", "mse_zero", "mse_full",
              "tp",        "tn",   "converged", "iterations", "alpha"};
  for (const auto& r : result.replicates) {
    for (const auto& e : r.records) {
      t.add_row({std::to_string(r.replicate), std::to_string(r.seed), to_string(e.estimator), e.ok ? "1" : "0",
                 format_double(e.mse_nonzero), format_double(e.mse_zero), format_double(e.mse_full),
                 format_double(e.tp), format_double(e.tn), e.converged ? "1" : "0", std::to_string(e.iterations),
                 format_double(e.alpha)});
    }
  }
  return t;
}

CsvTable reconstruction_table(const ReconstructionOutcome& outcome) {
  CsvTable t;
  t.header = {"estimator", "mape", "mse", "tp_rate", "tn_rate", "weak_mse", "converged", "iterations", "alpha"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& e : outcome.estimates) {
    if (!e.estimate.ok) {
      t.add_row({e.report.estimator, "nan", "nan", "nan", "nan", "nan", "0", "0", "nan"});
      continue;
    }
    t.add_row({e.report.estimator, format_double(e.report.mape.value_or(nan)), format_double(e.report.mse),
               format_double(e.report.tp_rate.value_or(nan)), format_double(e.report.tn_rate),
               format_double(e.weak_mse), e.estimate.converged ? "1" : "0", std::to_string(e.estimate.iterations),
               format_double(e.estimate.alpha)});
  }
  return t;
}

}  // namespace ramp
