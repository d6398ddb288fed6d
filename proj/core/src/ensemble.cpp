#include "skt/ensemble.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace skt {

NoiseCovariance NoiseCovariance::diagonal(Vector variances) {
  if (variances.size() == 0 || !(variances.array() > 0.0).all() || !variances.allFinite()) {
    throw ConfigError("noise covariance: diagonal variances must be positive and finite");
  }
  NoiseCovariance g;
  g.repr_ = std::move(variances);
  return g;
}

NoiseCovariance NoiseCovariance::isotropic(Index n, double sigma) {
  return diagonal(Vector::Constant(n, sigma * sigma));
}

NoiseCovariance NoiseCovariance::dense(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw ConfigError("noise covariance: matrix is not square");
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw ConfigError("noise covariance: matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("noise covariance: matrix is not positive definite");
  }
  NoiseCovariance g;
  g.repr_ = Dense{cov, CholeskyFactor{llt.matrixL(), 0.0}};
  return g;
}

Index NoiseCovariance::dim() const {
  if (auto* d = std::get_if<Vector>(&repr_)) return d->size();
  return std::get<Dense>(repr_).cov.rows();
}

Vector NoiseCovariance::whiten(const Vector& r) const {
  if (auto* d = std::get_if<Vector>(&repr_)) return r.array() / d->array().sqrt();
  return std::get<Dense>(repr_).chol.whiten(r);
}

Vector NoiseCovariance::sample(Rng& rng) const {
  const Index n = dim();
  Vector z(n);
  for (Index k = 0; k < n; ++k) z(k) = standard_normal(rng);
  if (auto* d = std::get_if<Vector>(&repr_)) return z.array() * d->array().sqrt();
  return std::get<Dense>(repr_).chol.lower * z;
}

Matrix NoiseCovariance::to_dense() const {
  if (auto* d = std::get_if<Vector>(&repr_)) return d->asDiagonal();
  return std::get<Dense>(repr_).cov;
}

Matrix NoiseCovariance::solve(const Matrix& b) const {
  if (auto* d = std::get_if<Vector>(&repr_)) return d->cwiseInverse().asDiagonal() * b;
  return std::get<Dense>(repr_).chol.solve(b);
}

void ModelSpec::validate() const {
  if (dim <= 0 || obs_dim <= 0) throw ConfigError("model '" + name + "': empty dimensions");
  if (data.size() != obs_dim) {
    throw ConfigError("model '" + name + "': data length " + std::to_string(data.size()) +
                      " != obs_dim " + std::to_string(obs_dim));
  }
  if (noise.dim() != obs_dim) throw ConfigError("model '" + name + "': noise dimension mismatch");
  if (!prior || prior->dim() != dim) throw ConfigError("model '" + name + "': prior dimension mismatch");
  if (!forward) throw ConfigError("model '" + name + "': no forward map");
}

Ensemble::Ensemble(RowMatrix states) : states_(std::move(states)) {
  if (states_.rows() < 2) throw NumericalError("ensemble needs at least two particles");
  if (!states_.allFinite()) throw NumericalError("ensemble has non-finite entries");
}

double misfit(const ModelSpec& model, const Vector& output) {
  return 0.5 * model.noise.whiten(model.data - output).squaredNorm();
}

ForwardBatch evaluate_ensemble(const ModelSpec& model, const RowMatrix& states,
                               EvalCounter& counter, const Executor& executor) {
  if (states.cols() != model.dim) {
    throw NumericalError("evaluate_ensemble: state dimension " + std::to_string(states.cols()) +
                         " != model dimension " + std::to_string(model.dim));
  }
  const Index J = states.rows();
  ForwardBatch batch{RowMatrix(J, model.obs_dim), Vector(J)};
  executor.parallel_for(static_cast<std::size_t>(J), [&](std::size_t idx) {
    const auto i = static_cast<Index>(idx);
    Vector out;
    try {
      out = model.forward(states.row(i).transpose());
    } catch (const ModelDomainError& e) {
      throw NumericalError("forward model rejected particle " + std::to_string(i) + ": " + e.what());
    }
    if (out.size() != model.obs_dim || !out.allFinite()) {
      throw NumericalError("forward model returned non-finite output for particle " +
                           std::to_string(i));
    }
    batch.outputs.row(i) = out.transpose();
    batch.misfits(i) = misfit(model, out);
  });
  counter.count += static_cast<std::uint64_t>(J);
  return batch;
}

double annealed_log_target(const ModelSpec& model, const Vector& x, double misfit_value,
                           double beta) {
  const double log_prior = model.prior->log_density(x);
  if (beta == 0.0) return log_prior;
  return log_prior - beta * misfit_value;
}

Moments ensemble_moments(const RowMatrix& states) {
  const Index J = states.rows();
  if (J < 2) throw NumericalError("ensemble_moments: need at least two particles");
  Moments m;
  m.mean = states.colwise().mean().transpose();
  const RowMatrix centered = states.rowwise() - m.mean.transpose();
  m.cov = (centered.transpose() * centered) / static_cast<double>(J - 1);
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  return m;
}

RowMatrix sample_prior(const ModelSpec& model, Index ensemble_size, const RngFactory& rngs) {
  RowMatrix states(ensemble_size, model.dim);
  for (Index i = 0; i < ensemble_size; ++i) {
    Rng rng = rngs.stream(Stream::kPrior, 0, 0, static_cast<std::uint64_t>(i));
    states.row(i) = model.prior->sample(rng).transpose();
  }
  return states;
}

}  // namespace skt
