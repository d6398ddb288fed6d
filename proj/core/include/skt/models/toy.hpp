#pragma once

#include <cstdint>

#include "skt/ensemble.hpp"

namespace skt::models {

// y = A x + η with a Gaussian prior: the conjugate case in which Kalman
// updates are exact.
struct LinearGaussianToy {
  ModelSpec spec;
  Matrix forward_matrix;
  Vector prior_mean;
  Matrix prior_cov;
  Vector posterior_mean;
  Matrix posterior_cov;
  // Parameter vector that generated the data (random instances only).
  Vector truth;
};

LinearGaussianToy linear_gaussian_toy(const Matrix& a, const Vector& prior_mean,
                                      const Matrix& prior_cov, const NoiseCovariance& noise,
                                      const Vector& data);

// Random instance: A has N(0,1) entries, prior N(0, I), data drawn from a
// prior sample plus N(0, σ²I) noise, all from instance_seed.
struct LinearToyConfig {
  Index dim = 5;
  Index obs_dim = 8;
  double noise_sigma = 1.0;
  std::uint64_t instance_seed = 11;
};

LinearGaussianToy make_linear_toy(const LinearToyConfig& cfg);

// F(x) = A x + c (x ⊙ x) with A = G/sqrt(d), G ~ N(0,1) entries, prior
// N(0, I) and data from a prior draw plus N(0, σ²I) noise.
struct NonlinearToyConfig {
  Index dim = 10;
  double quadratic = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t instance_seed = 20240;
};

struct NonlinearToy {
  ModelSpec spec;
  Matrix forward_matrix;
  Vector truth;
};

NonlinearToy make_nonlinear_toy(const NonlinearToyConfig& cfg);

}  // namespace skt::models
