#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ramp/compsense.hpp"
#include "ramp/io.hpp"
#include "ramp/simulation.hpp"

namespace ramp {

enum class Command { kSimulate, kEstimate, kStateEvolution, kReconstruct };

std::string to_string(Command c);
Command parse_command(const std::string& s);

struct EstimateSpec {
  std::string x_path;
  std::string y_path;
  std::optional<int> s_hint;
  SuiteConfig suite = [] {
    SuiteConfig c;
    c.tuning = TuningConfig{};  // alpha_min from delta
    return c;
  }();
};

// Optional RAMP run next to the fixed point: n = round(delta * p), assumed sparsity omega * p.
struct SeInstanceSpec {
  int p = 4000;
  int s = 50;  // true nonzeros
  DistributionSpec coefficients = DistributionSpec::dirac_pm1();
  RampConfig ramp;
};

struct StateEvolutionSpec {
  std::string loss = "composite";  // composite | squared
  std::vector<double> taus{0.25, 0.5, 0.75};
  std::vector<double> weights;     // empty: equal
  std::vector<double> intercepts;  // empty: quantiles of the error law
  DistributionSpec errors = DistributionSpec::student_t(3).with_target_sd(0.2);
  double delta = 0.5;
  double omega = 0.2;
  StateEvolutionOptions options;
  std::optional<SeInstanceSpec> instance;
};

struct ReconstructSpec {
  std::string signal_path;  // empty: synthetic signal
  int synthetic_length = 2048;
  ReconstructionConfig config;
};

struct RunManifest {
  Command command = Command::kSimulate;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int replicates = 50;
  int threads = 1;
  std::string table_tag;
  SimulationConfig simulation;
  EstimateSpec estimate;
  StateEvolutionSpec state_evolution;
  ReconstructSpec reconstruct;

  // Pushes seed, replicates, threads and the tag into the module configs.
  RunManifest resolved() const;
  void validate() const;
};

void to_json(Json& j, const RunManifest& m);
void from_json(const Json& j, RunManifest& m);

// Loss used by the state-evolution command.
Loss state_evolution_loss(const StateEvolutionSpec& spec);

// Each command writes manifest.json plus its artifacts into output_dir and returns the exit
// code: 0 iff every requested estimator produced a result.
int cmd_simulate(const RunManifest& manifest);
int cmd_estimate(const RunManifest& manifest);
int cmd_state_evolution(const RunManifest& manifest);
int cmd_reconstruct(const RunManifest& manifest);
int run_command(const RunManifest& manifest);

}  // namespace ramp
