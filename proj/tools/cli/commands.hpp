#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "skt/diagnostics.hpp"

namespace skt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

int exit_code_for(const std::exception& e);

// "A..B" (inclusive) or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

struct SeedOutcome {
  std::uint64_t seed = 0;
  int exit_code = kExitOk;
  std::string error;
  std::filesystem::path dir;
  std::optional<RunResult> result;
  std::optional<BiasReport> bias;

  bool ok() const { return exit_code == kExitOk; }
};

std::string metrics_json(const RunResult& result, const std::string& model_name,
                         std::uint64_t seed, bool wall_clock,
                         const std::optional<BiasReport>& bias);

// Reference for bias reporting: the configured file, else the closed-form
// posterior of the model when it has one.
std::optional<ReferenceMoments> resolve_reference(const ExperimentConfig& config,
                                                  const models::BenchmarkModel& model);

// Runs one seed and writes final_ensemble.csv, metrics.json,
// resolved_config.ini, optional snapshots/field/bias files and manifest.json
// into dir. Component errors are captured in the outcome, not thrown.
SeedOutcome run_seed(const ExperimentConfig& config, const models::BenchmarkModel& model,
                     std::uint64_t seed, const std::filesystem::path& dir,
                     const std::optional<ReferenceMoments>& reference);

// One row per seed plus an aggregate row of means and sample standard
// deviations.
std::string summary_csv(const std::vector<SeedOutcome>& outcomes);

// manifest.json listing every regular file under dir with size and SHA-256.
void write_manifest(const std::filesystem::path& dir);

int cmd_simulate(const ExperimentConfig& config, std::optional<std::uint64_t> seed,
                 const std::filesystem::path& outdir, std::ostream& out);
int cmd_run(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
            const std::filesystem::path& outdir, std::ostream& out);
int cmd_bias(const std::filesystem::path& ensemble, const std::filesystem::path& reference,
             const std::filesystem::path& report_path, std::ostream& out);

}  // namespace skt::cli
