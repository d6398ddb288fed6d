#pragma once

#include <cstdint>

#include "skt/ensemble.hpp"
#include "skt/parallel.hpp"
#include "skt/preconditioner.hpp"
#include "skt/rng.hpp"
#include "skt/types.hpp"

namespace skt {

// Empirical covariances of an ensemble and its forward outputs (divisor J−1)
// with the factorised innovation covariance C^{FF} + αΓ.
struct KalmanGainWorkspace {
  Matrix cross_cov;  // C^{xF}, d × n_y
  Matrix out_cov;    // C^{FF}, n_y × n_y
  CholeskyFactor innovation;

  static KalmanGainWorkspace build(const RowMatrix& states, const RowMatrix& outputs,
                                   const NoiseCovariance& noise, double alpha);
};

// Stochastic EKI update
//   x_i ← x_i + C^{xF}(C^{FF} + αΓ)^{-1}(y − F(x_i) + √α ξ_i),  ξ_i ~ N(0, Γ).
// ξ_i comes from the (kKalmanNoise, level, 0, i) substream.
RowMatrix eki_update(const RowMatrix& states, const ForwardBatch& batch, const ModelSpec& model,
                     double alpha, const RngFactory& rngs, std::uint64_t level);

// The same update on latent states z, with the forward model evaluated at
// f^{-1}(z). Adds J evaluations to counter.
RowMatrix faki_update(const RowMatrix& latent, const Preconditioner& precond,
                      const ModelSpec& model, double alpha, const RngFactory& rngs,
                      std::uint64_t level, EvalCounter& counter,
                      const Executor& executor = Executor(1));

// One linearly implicit EKS step under a Gaussian prior N(prior_mean,
// prior_cov):
//   (I + Δt C Γ_0^{-1}) x̂_j = x_j − Δt Σ_k D_kj x_k + Δt C Γ_0^{-1} m_0
//                            + Δt (d+1)/J (x_j − x̄)
//   x_j ← x̂_j + sqrt(2Δt C) ξ_j
// with C = C^{xx} (divisor J), D = (1/J)(F − F̄)Γ^{-1}(F − Y)^T and ξ_j from
// the (kEksNoise, step, 0, j) substream.
RowMatrix eks_step(const RowMatrix& states, const ForwardBatch& batch, const ModelSpec& model,
                   const Vector& prior_mean, const Matrix& prior_cov, double dt,
                   const RngFactory& rngs, std::uint64_t step);

// Δt = Δt_0 / (‖D‖_F + ε) with Δt_0 = 1, ε = 1e-5.
double eks_adaptive_dt(const ForwardBatch& batch, const Vector& data, const NoiseCovariance& noise);

}  // namespace skt
