#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ramp/amse.hpp"
#include "ramp/compsense.hpp"
#include "ramp/distribution.hpp"
#include "ramp/pipeline.hpp"
#include "ramp/simulation.hpp"
#include "ramp/solver.hpp"
#include "ramp/suite.hpp"
#include "ramp/wavelet.hpp"

namespace ramp {

using Json = nlohmann::json;  // std::map-backed: keys are written in sorted, stable order

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void add_row(const std::string& label, const std::vector<double>& values);
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
// Comma-separated. The first line is taken as a header when any field fails to parse as a
// number. Ragged rows and empty files are rejected.
CsvTable read_csv(const std::filesystem::path& path);

Matrix read_matrix_csv(const std::filesystem::path& path);
// One column, or a single row.
Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const Vector& v, const std::string& column);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

// Enum names used in manifests.
std::string to_string(SparsityMode m);
std::string to_string(BCalibrationRule r);
std::string to_string(CandidateMode m);
std::string to_string(CrossZetaRule r);
std::string to_string(InitMethod m);
std::string to_string(SeCoupling c);
SparsityMode parse_sparsity_mode(const std::string& s);
BCalibrationRule parse_b_rule(const std::string& s);
CandidateMode parse_candidate_mode(const std::string& s);
CrossZetaRule parse_cross_zeta(const std::string& s);
InitMethod parse_init_method(const std::string& s);
SeCoupling parse_coupling(const std::string& s);

// JSON conversions. Readers start from the defaults, so partial objects are fine; unknown keys
// are rejected.
void to_json(Json& j, const DistributionSpec& d);
void from_json(const Json& j, DistributionSpec& d);
void to_json(Json& j, const BGrid& g);
void from_json(const Json& j, BGrid& g);
void to_json(Json& j, const RampConfig& c);
void from_json(const Json& j, RampConfig& c);
void to_json(Json& j, const TuningConfig& c);
void from_json(const Json& j, TuningConfig& c);
void to_json(Json& j, const WeightSearchConfig& c);
void from_json(const Json& j, WeightSearchConfig& c);
void to_json(Json& j, const PipelineOptions& c);
void from_json(const Json& j, PipelineOptions& c);
void to_json(Json& j, const InterceptInit& c);
void from_json(const Json& j, InterceptInit& c);
void to_json(Json& j, const SuiteConfig& c);
void from_json(const Json& j, SuiteConfig& c);
void to_json(Json& j, const SimulationConfig& c);
void from_json(const Json& j, SimulationConfig& c);
void to_json(Json& j, const WaveletBasis& b);
void from_json(const Json& j, WaveletBasis& b);
void to_json(Json& j, const ReconstructionConfig& c);
void from_json(const Json& j, ReconstructionConfig& c);
void to_json(Json& j, const StateEvolutionOptions& o);
void from_json(const Json& j, StateEvolutionOptions& o);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& m);

// Cell layouts of the simulation tables:
//   1, 3: one row per MSE part (nonzero, zero, full), one column per estimator
//   2:    rows tp, tn
//   4:    one row per estimator with the parts, rates and convergence
//   5:    convergence percentage per estimator
CsvTable simulation_table(const SimulationResult& result, int table);
// Every summary statistic, one row per estimator.
CsvTable summary_table(const SimulationResult& result);
// One row per replicate and estimator.
CsvTable replicate_table(const SimulationResult& result);

// Reconstruction report: estimator, mape, mse, tp_rate, tn_rate, weak_mse, converged, iterations, alpha.
CsvTable reconstruction_table(const ReconstructionOutcome& outcome);

}  // namespace ramp
