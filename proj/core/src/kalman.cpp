#include "skt/kalman.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace skt {

namespace {

RowMatrix centered(const RowMatrix& m) { return m.rowwise() - m.colwise().mean(); }

}  // namespace

KalmanGainWorkspace KalmanGainWorkspace::build(const RowMatrix& states, const RowMatrix& outputs,
                                               const NoiseCovariance& noise, double alpha) {
  if (states.rows() != outputs.rows()) throw ConfigError("Kalman update: batch size mismatch");
  if (states.rows() < 2) throw ConfigError("Kalman update needs at least two particles");
  if (!(alpha > 0.0)) throw ConfigError("Kalman update: alpha must be positive");
  const double denom = static_cast<double>(states.rows() - 1);
  const RowMatrix xc = centered(states);
  const RowMatrix fc = centered(outputs);

  KalmanGainWorkspace ws;
  ws.cross_cov = xc.transpose() * fc / denom;
  ws.out_cov = fc.transpose() * fc / denom;
  ws.out_cov = 0.5 * (ws.out_cov + ws.out_cov.transpose());
  ws.innovation = jittered_cholesky(ws.out_cov + alpha * noise.to_dense());
  return ws;
}

RowMatrix eki_update(const RowMatrix& states, const ForwardBatch& batch, const ModelSpec& model,
                     double alpha, const RngFactory& rngs, std::uint64_t level) {
  const Index n = states.rows();
  const KalmanGainWorkspace ws = KalmanGainWorkspace::build(states, batch.outputs, model.noise, alpha);

  Matrix innovations(model.obs_dim, n);
  const double noise_scale = std::sqrt(alpha);
  for (Index i = 0; i < n; ++i) {
    Rng rng = rngs.stream(Stream::kKalmanNoise, level, 0, static_cast<std::uint64_t>(i));
    innovations.col(i) =
        model.data - batch.outputs.row(i).transpose() + noise_scale * model.noise.sample(rng);
  }
  const Matrix solved = ws.innovation.solve(innovations);
  RowMatrix out = states + (ws.cross_cov * solved).transpose();
  return out;
}

RowMatrix faki_update(const RowMatrix& latent, const Preconditioner& precond,
                      const ModelSpec& model, double alpha, const RngFactory& rngs,
                      std::uint64_t level, EvalCounter& counter, const Executor& executor) {
  const RowMatrix x = precond.inverse_all(latent);
  if (!x.allFinite()) throw NumericalError("FAKI: preconditioner inverse produced non-finite states");
  const ForwardBatch batch = evaluate_ensemble(model, x, counter, executor);
  return eki_update(latent, batch, model, alpha, rngs, level);
}

RowMatrix eks_step(const RowMatrix& states, const ForwardBatch& batch, const ModelSpec& model,
                   const Vector& prior_mean, const Matrix& prior_cov, double dt,
                   const RngFactory& rngs, std::uint64_t step) {
  const Index n = states.rows();
  const Index d = states.cols();
  const double jn = static_cast<double>(n);
  if (n < 2) throw ConfigError("EKS needs at least two particles");
  if (batch.outputs.rows() != n) throw ConfigError("EKS: batch size mismatch");

  const RowMatrix xc = centered(states);
  const RowMatrix fc = centered(batch.outputs);
  const RowMatrix resid = batch.outputs.rowwise() - model.data.transpose();
  // D_kj = (1/J) <F_k − F̄, Γ^{-1}(F_j − y)>
  const Matrix gamma_inv_resid = model.noise.solve(Matrix(resid.transpose()));
  const Matrix dmat = (fc * gamma_inv_resid) / jn;

  const Matrix cxx = (xc.transpose() * xc) / jn;
  const Matrix c_prior_inv = jittered_cholesky(prior_cov).solve(Matrix(cxx.transpose())).transpose();
  const Matrix system = Matrix::Identity(d, d) + dt * c_prior_inv;

  // Column j of rhs is the right-hand side for particle j.
  Matrix rhs = states.transpose();
  rhs -= dt * (xc.transpose() * dmat);
  rhs.colwise() += dt * (c_prior_inv * prior_mean);
  rhs += dt * (static_cast<double>(d) + 1.0) / jn * Matrix(xc.transpose());

  const Matrix xhat = system.partialPivLu().solve(rhs);
  const Matrix noise_factor = psd_factor(2.0 * dt * cxx);

  RowMatrix out(n, d);
  for (Index j = 0; j < n; ++j) {
    Rng rng = rngs.stream(Stream::kEksNoise, step, 0, static_cast<std::uint64_t>(j));
    Vector xi(d);
    for (Index k = 0; k < d; ++k) xi(k) = standard_normal(rng);
    out.row(j) = (xhat.col(j) + noise_factor * xi).transpose();
  }
  return out;
}

double eks_adaptive_dt(const ForwardBatch& batch, const Vector& data, const NoiseCovariance& noise) {
  if (batch.outputs.rows() == 0) throw ConfigError("EKS time step: empty batch");
  const double jn = static_cast<double>(batch.outputs.rows());
  const RowMatrix fc = centered(batch.outputs);
  const RowMatrix resid = batch.outputs.rowwise() - data.transpose();
  const Matrix dmat = (fc * noise.solve(Matrix(resid.transpose()))) / jn;
  return 1.0 / (dmat.norm() + 1e-5);
}

}  // namespace skt
