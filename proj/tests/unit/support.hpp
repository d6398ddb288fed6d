#pragma once

#include <cmath>
#include <memory>

#include "skt/ensemble.hpp"
#include "skt/models/priors.hpp"

namespace skt::test {

// F(x) = x with a N(0, I) prior.
inline ModelSpec identity_model(const Vector& y, double sigma = 1.0) {
  ModelSpec m;
  m.name = "identity";
  m.dim = y.size();
  m.obs_dim = y.size();
  m.data = y;
  m.noise = NoiseCovariance::isotropic(y.size(), sigma);
  m.prior = std::make_shared<models::GaussianPrior>(Vector::Zero(y.size()),
                                                    Matrix::Identity(y.size(), y.size()));
  m.forward = [](const Vector& x) -> Vector { return x; };
  return m;
}

inline RowMatrix normal_draws(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) x(i, k) = standard_normal(rng);
  return x;
}

inline double column_mean(const RowMatrix& x, Index k) { return x.col(k).mean(); }

inline double column_var(const RowMatrix& x, Index k) {
  const double m = x.col(k).mean();
  return (x.col(k).array() - m).square().sum() / static_cast<double>(x.rows() - 1);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace skt::test
