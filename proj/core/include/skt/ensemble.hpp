#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "skt/linalg.hpp"
#include "skt/parallel.hpp"
#include "skt/rng.hpp"
#include "skt/types.hpp"

namespace skt {

// Observation noise covariance Γ: either a diagonal (variances) or a dense SPD
// matrix with a cached Cholesky factor.
class NoiseCovariance {
 public:
  static NoiseCovariance diagonal(Vector variances);
  static NoiseCovariance isotropic(Index n, double sigma);
  static NoiseCovariance dense(const Matrix& cov);

  Index dim() const;
  bool is_diagonal() const { return std::holds_alternative<Vector>(repr_); }

  // Γ^{-1/2} r (for the dense case, L^{-1} r with Γ = L L^T).
  Vector whiten(const Vector& r) const;
  // Draws ξ ~ N(0, Γ).
  Vector sample(Rng& rng) const;
  // Γ as a dense matrix.
  Matrix to_dense() const;
  // Γ^{-1} b
  Matrix solve(const Matrix& b) const;

 private:
  struct Dense {
    Matrix cov;
    CholeskyFactor chol;
  };
  std::variant<Vector, Dense> repr_;
};

// Prior over the unconstrained parameter vector. log_density includes the
// Jacobian terms of any constraining transforms.
class Prior {
 public:
  virtual ~Prior() = default;
  virtual Index dim() const = 0;
  virtual Vector sample(Rng& rng) const = 0;
  virtual double log_density(const Vector& x) const = 0;
};

using ForwardMap = std::function<Vector(const Vector&)>;

// Everything an inference scheme needs to know about a Bayesian inverse
// problem y = F(x) + η, η ~ N(0, Γ). forward must be safe to call
// concurrently.
struct ModelSpec {
  std::string name;
  Index dim = 0;
  Index obs_dim = 0;
  Vector data;
  NoiseCovariance noise = NoiseCovariance::isotropic(1, 1.0);
  std::shared_ptr<const Prior> prior;
  ForwardMap forward;

  // Throws ConfigError on inconsistent shapes.
  void validate() const;
};

// J×d particle states in unconstrained coordinates.
class Ensemble {
 public:
  Ensemble() = default;
  explicit Ensemble(RowMatrix states);

  Index size() const { return states_.rows(); }
  Index dim() const { return states_.cols(); }
  const RowMatrix& states() const { return states_; }
  RowMatrix& states() { return states_; }
  Vector particle(Index i) const { return states_.row(i).transpose(); }

  // J < 2d: the multivariate t EM fit is not reliably stable.
  bool undersized() const { return size() < 2 * dim(); }

 private:
  RowMatrix states_;
};

// Forward outputs F(x^i) and misfits Φ_i = ½‖Γ^{-1/2}(y − F(x^i))‖².
struct ForwardBatch {
  RowMatrix outputs;
  Vector misfits;
};

// Counts forward model evaluations.
struct EvalCounter {
  std::uint64_t count = 0;
};

double misfit(const ModelSpec& model, const Vector& output);

// Evaluates F on every particle. The result does not depend on the number of
// executor workers. Throws NumericalError naming the particle index if an
// output is non-finite or the model rejects the parameters.
ForwardBatch evaluate_ensemble(const ModelSpec& model, const RowMatrix& states,
                               EvalCounter& counter, const Executor& executor = Executor(1));

// log π_0(x) − β Φ(x). The β-independent Gaussian normalisation is dropped.
// At β = 0 the misfit argument is never read.
double annealed_log_target(const ModelSpec& model, const Vector& x, double misfit, double beta);

struct Moments {
  Vector mean;
  Matrix cov;
};

// Sample mean and unbiased (J−1) covariance. Requires J ≥ 2.
Moments ensemble_moments(const RowMatrix& states);

// Draws J particles from the prior using per-particle substreams.
RowMatrix sample_prior(const ModelSpec& model, Index ensemble_size, const RngFactory& rngs);

}  // namespace skt
