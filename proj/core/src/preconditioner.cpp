#include "skt/preconditioner.hpp"

#include <Eigen/Dense>

#include "skt/ensemble.hpp"

namespace skt {

RowMatrix Preconditioner::forward_all(const RowMatrix& states) const {
  RowMatrix out(states.rows(), states.cols());
  for (Index i = 0; i < states.rows(); ++i) out.row(i) = forward(states.row(i).transpose()).transpose();
  return out;
}

RowMatrix Preconditioner::inverse_all(const RowMatrix& latent) const {
  RowMatrix out(latent.rows(), latent.cols());
  for (Index i = 0; i < latent.rows(); ++i) out.row(i) = inverse(latent.row(i).transpose()).transpose();
  return out;
}

AffineMap fit_affine(const RowMatrix& states) {
  const Moments m = ensemble_moments(states);
  return AffineMap{m.mean, jittered_cholesky(m.cov).lower};
}

double logdet_inverse(const AffineMap& map) { return map.lower.diagonal().array().log().sum(); }

AffinePreconditioner::AffinePreconditioner(AffineMap map)
    : map_(std::move(map)), log_det_(logdet_inverse(map_)) {}

void AffinePreconditioner::fit(const RowMatrix& states) {
  map_ = fit_affine(states);
  log_det_ = logdet_inverse(map_);
}

Vector AffinePreconditioner::forward(const Vector& x) const {
  return map_.lower.triangularView<Eigen::Lower>().solve(x - map_.mean);
}

Vector AffinePreconditioner::inverse(const Vector& z) const {
  return map_.mean + map_.lower.triangularView<Eigen::Lower>() * z;
}

std::unique_ptr<Preconditioner> make_preconditioner(const std::string& name) {
  if (name == "identity") return std::make_unique<IdentityPreconditioner>();
  if (name == "affine") return std::make_unique<AffinePreconditioner>();
  throw ConfigError("unknown preconditioner '" + name + "' (expected identity|affine)");
}

}  // namespace skt
