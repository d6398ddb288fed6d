#pragma once

#include <vector>

#include "skt/types.hpp"

namespace skt::models {

enum class TimeScheme { kBackwardEuler, kCrankNicolson };

// s_t = D s_xx + γ s² + u(x) on [0, 1], s = 0 on the boundary and at t = 0.
struct ReactionDiffusionConfig {
  Index nodes = 100;  // x_i = i/(nodes − 1)
  Index steps = 100;
  double t_final = 1.0;
  double diffusion = 0.1;
  double reaction = 0.1;
  Index obs_x = 10;  // observed nodes: stride nodes/obs_x, offset stride/2
  Index obs_t = 10;  // observed steps: multiples of steps/obs_t
  double noise_sigma = 0.01;
  TimeScheme scheme = TimeScheme::kCrankNicolson;
  double newton_tol = 1e-10;
  int newton_max_iter = 20;
  // Source expansion on [−L, L]; solver x is shifted by −0.5.
  double half_width = 1.0;
  Index order = 50;
  // Synthetic truth.
  double truth_mean = 0.0;
  double truth_alpha = 1.0;
  double truth_length_scale = 0.1;
  Index truth_order = 50;
  // Priors: μ_H ~ N(0, ·), α_H ~ HalfNormal, ℓ_H ~ InverseGamma.
  double prior_mean_sigma = 0.1;
  double prior_alpha_sigma = 1.0;
  double prior_length_shape = 4.0;
  double prior_length_scale = 0.3;
};

class ReactionDiffusionSolver {
 public:
  explicit ReactionDiffusionSolver(const ReactionDiffusionConfig& cfg);

  Vector nodes() const;
  // Source-term evaluation points x − 0.5.
  Vector shifted_nodes() const;

  // Full trajectory, (steps + 1) × nodes, row n at t = n·Δt. Throws
  // ModelDomainError if a Newton solve does not reach newton_tol in
  // newton_max_iter iterations. max_residual, when given, receives the
  // largest final Newton residual (∞-norm) over all steps.
  Matrix solve(const Vector& source, double* max_residual = nullptr) const;
  // Observations ordered time-major: index k·obs_x + p.
  Vector observe(const Matrix& trajectory) const;
  Vector forward(const Vector& source) const { return observe(solve(source)); }

  std::vector<Index> observed_nodes() const;
  std::vector<Index> observed_steps() const;

 private:
  ReactionDiffusionConfig cfg_;
};

}  // namespace skt::models
