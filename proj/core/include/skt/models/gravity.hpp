#pragma once

#include "skt/types.hpp"

namespace skt::models {

// Vertical gravity anomaly on a surface grid from a density field buried at
// depth δ under the unit square, by midpoint quadrature.
struct GravityConfig {
  Index quadrature = 64;  // Q, density grid is Q × Q midpoints
  Index surface = 10;     // surface grid is surface × surface midpoints
  double depth = 0.1;
  double noise_sigma = 0.1;
  // Inference density KL (Matérn-3/2).
  double length_scale = 0.2;
  Index order = 60;
  // Eigenproblem grid; smaller than quadrature means bilinear resampling.
  Index kl_grid = 64;
  // Priors: μ_K ~ N(0, ·), σ_K ~ HalfNormal.
  double prior_mean_sigma = 1.0;
  double prior_field_sigma = 0.2;
};

class GravitySolver {
 public:
  explicit GravitySolver(const GravityConfig& cfg);

  // ζ(s_i) = Σ_j ω_j δ / ‖s_i − x_j‖³ ϱ(x_j), ω_j = 1/Q². density has Q²
  // entries (row-major).
  Vector forward(const Vector& density) const;
  const Matrix& kernel() const { return kernel_; }

  // Midpoint coordinates (i + 0.5)/n.
  static Vector midpoints(Index n);
  // Reference sinusoid sin(πx₁) + sin(3πx₂) + x₂ + 1 on the quadrature grid,
  // scaled to unit maximum.
  Vector truth_density() const;

 private:
  GravityConfig cfg_;
  Matrix kernel_;  // surface² × Q²
};

}  // namespace skt::models
