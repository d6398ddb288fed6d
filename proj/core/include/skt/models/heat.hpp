#pragma once

#include "skt/types.hpp"

namespace skt::models {

// Square plate [0, L]² with zero Dirichlet edges, explicit FTCS time
// stepping, and block-averaged observations.
struct HeatConfig {
  double plate_length = 10.0;
  Index grid = 64;  // nodes per side, x_i = i L / (grid − 1)
  Index steps = 1000;
  double t_final = 1.0;
  Index obs_blocks = 8;  // blocks per side
  double noise_sigma = 0.2;
  // Initial-field KL (kernel on x/L coordinates).
  double length_scale = 0.1;
  Index order = 100;
  // Synthetic truth.
  double truth_diffusivity = 0.5;
  double truth_mean = 0.0;
  double truth_sigma = 1.0;
  Index truth_order = 200;
  // Priors: D ~ HalfNormal, μ_K ~ N(0, ·), σ_K ~ HalfNormal.
  double prior_diffusivity_sigma = 0.5;
  double prior_mean_sigma = 0.1;
  double prior_field_sigma = 1.0;
};

class HeatSolver {
 public:
  explicit HeatSolver(const HeatConfig& cfg);

  double dx() const { return dx_; }
  double dt() const { return dt_; }
  // Largest D with D Δt/Δx² ≤ 1/4.
  double max_stable_diffusivity() const;

  // Evolves the grid×grid initial field (row-major, edges forced to zero) to
  // t_final. Throws ModelDomainError when D violates the stability bound.
  Vector evolve(const Vector& initial, double diffusivity) const;
  // Block averages of a grid×grid field, obs_blocks² values.
  Vector observe(const Vector& field) const;
  Vector forward(const Vector& initial, double diffusivity) const {
    return observe(evolve(initial, diffusivity));
  }
  // Normalised node coordinates x_i / L.
  Vector unit_axis() const;

 private:
  HeatConfig cfg_;
  double dx_;
  double dt_;
};

}  // namespace skt::models
