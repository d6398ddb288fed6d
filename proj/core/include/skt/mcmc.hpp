#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "skt/ensemble.hpp"
#include "skt/linalg.hpp"
#include "skt/preconditioner.hpp"
#include "skt/rng.hpp"
#include "skt/types.hpp"

namespace skt {

inline constexpr double kNuMin = 0.5;
inline constexpr double kNuMax = 1e6;
inline constexpr double kRhoMin = 1e-6;
inline constexpr double kDefaultAlphaStar = 0.234;

// Gaussian reference N(mu, cov) for pCN.
struct PcnParams {
  Vector mu;
  Matrix cov;
  CholeskyFactor chol;
  double rho = 1.0;

  static PcnParams make(Vector mu, Matrix cov, double rho = 1.0);
};

// Multivariate t reference t_nu(mu, scale) for tpCN.
struct TDistParams {
  double nu = 1.0;
  Vector mu;
  Matrix scale;
  CholeskyFactor chol;
  double rho = 1.0;

  // nu is clamped to [kNuMin, kNuMax].
  static TDistParams make(double nu, Vector mu, Matrix scale, double rho = 1.0);
  // (x − mu)^T scale^{-1} (x − mu)
  double mahalanobis(const Vector& x) const;
};

using KernelParams = std::variant<PcnParams, TDistParams>;

struct KernelStats {
  double mean_accept = 0.0;
  std::uint64_t accept_count = 0;
  std::uint64_t proposal_count = 0;
};

using LogTarget = std::function<double(const Vector&)>;

struct ChainState {
  Vector x;
  double log_target = 0.0;
};

struct StepResult {
  ChainState state;
  bool accepted = false;
  double alpha = 0.0;
};

// Random-number consumption per step is fixed: (tpCN only) one Gamma draw for
// Z^{-1}, then d standard normals for W, then exactly one uniform for the
// accept test, which is drawn even when the proposal is rejected outright.
// A non-finite target at the proposal is a reject with alpha = 0. Rejected
// steps return the input state unchanged.
StepResult pcn_step(const ChainState& current, const LogTarget& log_target,
                    const PcnParams& params, Rng& rng);
StepResult tpcn_step(const ChainState& current, const LogTarget& log_target,
                     const TDistParams& params, Rng& rng);
StepResult kernel_step(const ChainState& current, const LogTarget& log_target,
                       const KernelParams& params, Rng& rng);

// Chain state in the latent coordinates of a preconditioner, carrying the
// forward output and misfit of f^{-1}(z) so they need not be recomputed.
struct LatentState {
  Vector z;
  double log_target = 0.0;
  Vector output;
  double misfit = 0.0;
};

struct LatentStepResult {
  LatentState state;
  bool accepted = false;
  double alpha = 0.0;
};

// log π_0(f^{-1}(z)) − β Φ + log|det ∂f^{-1}(z)|
double latent_log_target(const ModelSpec& model, const Preconditioner& precond,
                         const Vector& z, double misfit, double beta);

// One kernel step on the latent target. Each call evaluates the forward model
// once at f^{-1}(z') and adds one to counter. A model domain error or a
// non-finite output rejects the proposal; a non-finite inverse map rejects and
// warns.
LatentStepResult latent_step(const LatentState& current, const Preconditioner& precond,
                             const ModelSpec& model, double beta, const KernelParams& params,
                             Rng& rng, EvalCounter& counter);
LatentStepResult tpcn_latent_step(const LatentState& current, const Preconditioner& precond,
                                  const ModelSpec& model, double beta,
                                  const TDistParams& params, Rng& rng, EvalCounter& counter);

// Diminishing adaptation after sweep m ≥ 1:
//   log rho += (<alpha_m> − alpha_star)/m, clamped to [kRhoMin, 1]
//   mu      += (<x_m> − mu)/m
// The scale (and nu) are left untouched.
PcnParams adapt_kernel(PcnParams params, const KernelStats& stats, const Vector& ensemble_mean,
                       int m, double alpha_star = kDefaultAlphaStar);
TDistParams adapt_kernel(TDistParams params, const KernelStats& stats,
                         const Vector& ensemble_mean, int m,
                         double alpha_star = kDefaultAlphaStar);
KernelParams adapt_kernel(const KernelParams& params, const KernelStats& stats,
                          const Vector& ensemble_mean, int m,
                          double alpha_star = kDefaultAlphaStar);

double kernel_rho(const KernelParams& params);

}  // namespace skt
