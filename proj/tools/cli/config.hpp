#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skt/models/benchmarks.hpp"
#include "skt/samplers.hpp"

namespace skt::cli {

struct OutputOptions {
  bool snapshot_levels = false;
  // When false, wall_time_s is written as 0 so that repeated runs are
  // byte-identical.
  bool wall_clock = true;
  bool reconstruct_field = false;
  // reference_moments.csv for bias reporting; empty uses the closed-form
  // posterior when the model has one.
  std::filesystem::path reference;
};

struct ExperimentConfig {
  models::ModelOptions model;
  RunConfig run;
  OutputOptions output;
};

// Strict INI parsing: sections [model], [scheme], [kernel], [annealing],
// [output]; unknown sections or keys throw ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with its current value, in a form parse_config accepts.
std::string render_config(const ExperimentConfig& config);

// "section.key" for every addressable setting.
std::vector<std::string> config_keys();

}  // namespace skt::cli
