#include "skt/models/toy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>

#include "skt/models/priors.hpp"

namespace skt::models {

LinearGaussianToy linear_gaussian_toy(const Matrix& a, const Vector& prior_mean,
                                      const Matrix& prior_cov, const NoiseCovariance& noise,
                                      const Vector& data) {
  const Index d = a.cols();
  if (prior_mean.size() != d || prior_cov.rows() != d || a.rows() != data.size() ||
      noise.dim() != data.size())
    throw ConfigError("linear toy: inconsistent shapes");

  LinearGaussianToy toy;
  toy.forward_matrix = a;
  toy.prior_mean = prior_mean;
  toy.prior_cov = prior_cov;

  const Matrix prior_prec = prior_cov.llt().solve(Matrix::Identity(d, d));
  const Matrix gamma_inv_a = noise.solve(a);
  Matrix post_prec = prior_prec + a.transpose() * gamma_inv_a;
  post_prec = 0.5 * (post_prec + post_prec.transpose());
  toy.posterior_cov = post_prec.llt().solve(Matrix::Identity(d, d));
  toy.posterior_cov = 0.5 * (toy.posterior_cov + toy.posterior_cov.transpose());
  toy.posterior_mean =
      toy.posterior_cov * (prior_prec * prior_mean + gamma_inv_a.transpose() * data);

  toy.spec.name = "linear_toy";
  toy.spec.dim = d;
  toy.spec.obs_dim = a.rows();
  toy.spec.data = data;
  toy.spec.noise = noise;
  toy.spec.prior = std::make_shared<GaussianPrior>(prior_mean, prior_cov);
  toy.spec.forward = [a](const Vector& x) -> Vector { return a * x; };
  return toy;
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = standard_normal(rng);
  return m;
}

Vector gaussian_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

}  // namespace

LinearGaussianToy make_linear_toy(const LinearToyConfig& cfg) {
  if (cfg.dim < 1 || cfg.obs_dim < 1 || !(cfg.noise_sigma > 0.0))
    throw ConfigError("linear toy: dimensions and noise must be positive");
  Rng rng = RngFactory(cfg.instance_seed).stream(Stream::kTruth);
  const Matrix a = gaussian_matrix(cfg.obs_dim, cfg.dim, rng);
  const Vector truth = gaussian_vector(cfg.dim, rng);
  const Vector y = a * truth + cfg.noise_sigma * gaussian_vector(cfg.obs_dim, rng);
  LinearGaussianToy toy =
      linear_gaussian_toy(a, Vector::Zero(cfg.dim), Matrix::Identity(cfg.dim, cfg.dim),
                          NoiseCovariance::isotropic(cfg.obs_dim, cfg.noise_sigma), y);
  toy.truth = truth;
  return toy;
}

NonlinearToy make_nonlinear_toy(const NonlinearToyConfig& cfg) {
  if (cfg.dim < 1 || !(cfg.noise_sigma > 0.0))
    throw ConfigError("nonlinear toy: dimension and noise must be positive");
  const Index d = cfg.dim;
  Rng rng = RngFactory(cfg.instance_seed).stream(Stream::kTruth);
  NonlinearToy toy;
  toy.forward_matrix = gaussian_matrix(d, d, rng) / std::sqrt(static_cast<double>(d));
  toy.truth = gaussian_vector(d, rng);

  const Matrix a = toy.forward_matrix;
  const double c = cfg.quadratic;
  auto forward = [a, c](const Vector& x) -> Vector {
    return a * x + c * x.cwiseProduct(x);
  };
  toy.spec.name = "nonlinear_toy";
  toy.spec.dim = d;
  toy.spec.obs_dim = d;
  toy.spec.data = forward(toy.truth) + cfg.noise_sigma * gaussian_vector(d, rng);
  toy.spec.noise = NoiseCovariance::isotropic(d, cfg.noise_sigma);
  toy.spec.prior = std::make_shared<GaussianPrior>(Vector::Zero(d), Matrix::Identity(d, d));
  toy.spec.forward = forward;
  return toy;
}

}  // namespace skt::models
