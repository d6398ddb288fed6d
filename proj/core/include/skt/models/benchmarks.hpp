#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skt/ensemble.hpp"
#include "skt/models/gravity.hpp"
#include "skt/models/heat.hpp"
#include "skt/models/reaction_diffusion.hpp"
#include "skt/models/toy.hpp"

namespace skt::models {

// Every constant needed to build one of the benchmark problems.
struct ModelOptions {
  std::string name = "linear_toy";  // heat | gravity | reaction_diffusion | linear_toy | nonlinear_toy
  HeatConfig heat;
  GravityConfig gravity;
  ReactionDiffusionConfig reaction_diffusion;
  LinearToyConfig linear_toy;
  NonlinearToyConfig nonlinear_toy;
  // y.csv to load; empty means simulate from data_seed.
  std::filesystem::path data_file;
  std::uint64_t data_seed = 0;
  // Directory for KL basis caches; empty disables caching.
  std::filesystem::path cache_dir;
};

const std::vector<std::string>& model_names();

struct SimulatedData {
  Vector y;
  Vector signal;  // noiseless observations
  std::vector<std::pair<std::string, double>> truth_scalars;
  Vector truth_coefficients;
  Vector truth_field;
};

struct BenchmarkModel {
  ModelSpec spec;
  // Physical field of one parameter vector: heat initial field, gravity
  // density, reaction-diffusion source, or the parameters for toys.
  std::function<Vector(const Vector&)> field;
  Index field_rows = 1;
  Index field_cols = 1;
  // Closed-form posterior when available (linear toy).
  std::optional<Moments> exact_posterior;
};

// Deterministic synthetic data: truth coefficients from the kTruth stream
// and observation noise from the kDataNoise stream of seed.
SimulatedData simulate_data(const ModelOptions& options, std::uint64_t seed);

// Builds the inference model with the given data vector.
BenchmarkModel make_model(const ModelOptions& options, const Vector& data);
// Loads options.data_file or simulates with options.data_seed.
BenchmarkModel make_model(const ModelOptions& options);

// Writes y.csv, signal.csv and truth.json; returns the written paths.
std::vector<std::filesystem::path> write_simulation(const std::filesystem::path& outdir,
                                                    const ModelOptions& options,
                                                    const SimulatedData& data);

}  // namespace skt::models
