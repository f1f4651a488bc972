#include <cstdlib>
#include <iostream>
#include <optional>
#include <utility>
#include <string>

#include <CLI11.hpp>

#include "ramp/commands.hpp"

namespace {

struct Flags {
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> table;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--manifest", f.manifest, "Run manifest (JSON)");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--reps", f.reps, "Replicate count");
  app->add_option("--out", f.out, "Output directory (overrides RAMP_OUT_DIR)");
  app->add_option("--threads", f.threads, "Worker threads");
  app->add_option("--table", f.table, "Table preset, e.g. table1-t3-s5");
}

ramp::RunManifest build(ramp::Command command, const Flags& f) {
  ramp::RunManifest m;
  if (!f.manifest.empty()) m = ramp::read_json(f.manifest).get<ramp::RunManifest>();
  m.command = command;
  if (const char* env = std::getenv("RAMP_OUT_DIR"); env && *env) m.output_dir = env;
  if (f.out) m.output_dir = *f.out;
  if (f.seed) m.seed = *f.seed;
  if (f.reps) m.replicates = *f.reps;
  if (f.threads) m.threads = *f.threads;
  if (f.table) m.table_tag = *f.table;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust AMP estimators: simulations, estimation, state evolution, reconstruction"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<ramp::Command> chosen;
  const std::pair<ramp::Command, const char*> subs[] = {
      {ramp::Command::kSimulate, "Monte Carlo replicates of every estimator on synthetic data"},
      {ramp::Command::kEstimate, "Fit the estimator suite to X and Y read from CSV"},
      {ramp::Command::kStateEvolution, "Solve the scalar state-evolution fixed point"},
      {ramp::Command::kReconstruct, "Compressed-sensing reconstruction of a wavelet-sparse signal"}};
  for (const auto& [cmd, help] : subs) {
    const ramp::Command c = cmd;
    CLI::App* sub = app.add_subcommand(ramp::to_string(c), help);
    add_flags(sub, flags);
    sub->callback([&chosen, c] { chosen = c; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    const ramp::RunManifest m = build(*chosen, flags);
    return ramp::run_command(m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
