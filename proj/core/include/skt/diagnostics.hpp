#pragma once

#include <filesystem>
#include <string>

#include "skt/models/benchmarks.hpp"
#include "skt/types.hpp"

namespace skt {

// Below this value of both dimension-averaged squared biases a run is in the
// low-bias regime.
inline constexpr double kLowBiasThreshold = 1e-2;

// Posterior E[x], Var[x], E[x²], Var[x²] per dimension.
struct ReferenceMoments {
  Vector mean_x;
  Vector var_x;
  Vector mean_x2;
  Vector var_x2;

  Index dim() const { return mean_x.size(); }
  // Throws ConfigError on shape mismatch or non-positive variances.
  void validate() const;
};

struct BiasReport {
  double b1_sq = 0.0;
  double b2_sq = 0.0;
  Vector per_dim_b1;
  Vector per_dim_b2;

  bool low_bias() const { return b1_sq < kLowBiasThreshold && b2_sq < kLowBiasThreshold; }
};

// Squared error of the ensemble's first and second moments, normalized by the
// reference variances and averaged over dimensions.
BiasReport squared_bias(const RowMatrix& ensemble, const ReferenceMoments& ref);

// Moments of chain samples (one sample per row). Requires at least
// min_samples rows.
ReferenceMoments reference_from_samples(const RowMatrix& samples, Index min_samples = 1000);
// Reads a sample CSV (same layout as ensemble snapshots).
ReferenceMoments reference_from_chain(const std::filesystem::path& path,
                                      Index min_samples = 1000);

// Exact moments of a Gaussian: E[x²] = m² + v, Var[x²] = 4m²v + 2v².
ReferenceMoments gaussian_reference(const Vector& mean, const Vector& var);

// CSV with header dim,mean_x,var_x,mean_x2,var_x2.
void write_reference_moments(const std::filesystem::path& path, const ReferenceMoments& ref);
ReferenceMoments read_reference_moments(const std::filesystem::path& path);

// {"b1_sq": ..., "b2_sq": ..., "per_dim": [{"dim", "b1_sq", "b2_sq"}...]}
std::string bias_report_json(const BiasReport& report);

// Ensemble average of the model's physical field, shaped field_rows × field_cols.
Matrix reconstruct_field(const RowMatrix& ensemble, const models::BenchmarkModel& model);

}  // namespace skt
