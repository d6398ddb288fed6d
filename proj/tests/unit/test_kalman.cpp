#include <Eigen/Dense>

#include <cmath>

#include "doctest.h"
#include "skt/kalman.hpp"
#include "skt/models/priors.hpp"
#include "support.hpp"

using namespace skt;

namespace {

ModelSpec linear_model(const Matrix& a, const Vector& y, double sigma) {
  ModelSpec m;
  m.name = "linear";
  m.dim = a.cols();
  m.obs_dim = a.rows();
  m.data = y;
  m.noise = NoiseCovariance::isotropic(a.rows(), sigma);
  m.prior = std::make_shared<models::GaussianPrior>(Vector::Zero(a.cols()),
                                                    Matrix::Identity(a.cols(), a.cols()));
  m.forward = [a](const Vector& x) -> Vector { return a * x; };
  return m;
}

ForwardBatch eval(const ModelSpec& m, const RowMatrix& x) {
  EvalCounter c;
  return evaluate_ensemble(m, x, c);
}

}  // namespace

TEST_SUITE("kalman") {
  TEST_CASE("constant forward model leaves the ensemble unchanged") {
    ModelSpec m = test::identity_model(Vector::Ones(2));
    m.forward = [](const Vector&) -> Vector { return Vector::Constant(2, 0.3); };
    const RowMatrix x = test::normal_draws(50, 2, 1);
    const RowMatrix out = eki_update(x, eval(m, x), m, 1.0, RngFactory(1), 0);
    CHECK((out - x).norm() == 0.0);
  }

  TEST_CASE("single step is exact in the linear-Gaussian case") {
    Matrix a(2, 3);
    a << 1.0, 0.5, 0.0, -0.3, 1.0, 2.0;
    Vector y(2);
    y << 0.8, -1.5;
    const double sigma = 0.7;
    const ModelSpec m = linear_model(a, y, sigma);
    // Closed-form conjugate posterior.
    const Matrix prec = Matrix::Identity(3, 3) + a.transpose() * a / (sigma * sigma);
    const Matrix post_cov = prec.inverse();
    const Vector post_mean = post_cov * a.transpose() * y / (sigma * sigma);

    const Index j = 20000;
    const RowMatrix x = test::normal_draws(j, 3, 2);
    const RowMatrix out = eki_update(x, eval(m, x), m, 1.0, RngFactory(2), 0);
    const Moments mo = ensemble_moments(out);
    for (Index k = 0; k < 3; ++k) {
      const double se = std::sqrt(post_cov(k, k) / static_cast<double>(j));
      CHECK(std::abs(mo.mean(k) - post_mean(k)) < 3.0 * se);
      for (Index l = 0; l < 3; ++l)
        CHECK(std::abs(mo.cov(k, l) - post_cov(k, l)) < 0.05 * std::sqrt(post_cov(k, k) * post_cov(l, l)));
    }
  }

  TEST_CASE("huge alpha barely moves particles") {
    Vector y(2);
    y << 3.0, -3.0;
    const ModelSpec m = test::identity_model(y, 0.1);
    const RowMatrix x = test::normal_draws(100, 2, 3);
    const RowMatrix out = eki_update(x, eval(m, x), m, 1e12, RngFactory(3), 0);
    CHECK((out - x).cwiseAbs().maxCoeff() < 1e-4);
  }

  TEST_CASE("update matches a direct gain computation") {
    Vector y(2);
    y << 0.4, 0.1;
    ModelSpec m = test::identity_model(y, 0.5);
    m.forward = [](const Vector& x) -> Vector {
      Vector f(2);
      f << x(0) + x(1) * x(1), std::sin(x(0));
      return f;
    };
    const RowMatrix x = test::normal_draws(30, 2, 4);
    const ForwardBatch b = eval(m, x);
    const double alpha = 2.5;
    const RngFactory rngs(4);
    const RowMatrix out = eki_update(x, b, m, alpha, rngs, 7);

    const Vector xm = x.colwise().mean().transpose();
    const Vector fm = b.outputs.colwise().mean().transpose();
    Matrix cxf = Matrix::Zero(2, 2), cff = Matrix::Zero(2, 2);
    for (Index i = 0; i < 30; ++i) {
      const Vector dx = x.row(i).transpose() - xm;
      const Vector df = b.outputs.row(i).transpose() - fm;
      cxf += dx * df.transpose() / 29.0;
      cff += df * df.transpose() / 29.0;
    }
    const Matrix gain = cxf * (cff + alpha * 0.25 * Matrix::Identity(2, 2)).inverse();
    for (Index i = 0; i < 30; ++i) {
      Rng rng = rngs.stream(Stream::kKalmanNoise, 7, 0, static_cast<std::uint64_t>(i));
      const Vector xi = m.noise.sample(rng);
      const Vector expected =
          x.row(i).transpose() + gain * (y - b.outputs.row(i).transpose() + std::sqrt(alpha) * xi);
      CHECK((out.row(i).transpose() - expected).norm() < 1e-10);
    }
  }

  TEST_CASE("FAKI with the identity map equals EKI bit for bit") {
    Vector y(3);
    y << 1.0, 0.0, -1.0;
    const ModelSpec m = test::identity_model(y, 0.3);
    const RowMatrix x = test::normal_draws(40, 3, 5);
    const RngFactory rngs(5);
    EvalCounter c;
    const RowMatrix a = eki_update(x, eval(m, x), m, 1.7, rngs, 2);
    const RowMatrix b = faki_update(x, IdentityPreconditioner(), m, 1.7, rngs, 2, c);
    CHECK(a == b);
    CHECK(c.count == 40);
  }

  TEST_CASE("FAKI commutes with an affine map for linear models") {
    Matrix a(2, 2);
    a << 1.0, 0.4, 0.2, 1.5;
    Vector y(2);
    y << 0.5, -0.5;
    const ModelSpec m = linear_model(a, y, 0.4);
    const RowMatrix x = test::normal_draws(60, 2, 6);
    Matrix l(2, 2);
    l << 2.0, 0.0, 0.7, 0.5;
    Vector shift(2);
    shift << 1.0, -2.0;
    const AffinePreconditioner pre(AffineMap{shift, l});
    const RngFactory rngs(6);
    EvalCounter c;
    const RowMatrix z_new = faki_update(pre.forward_all(x), pre, m, 1.0, rngs, 0, c);
    const RowMatrix x_new = eki_update(x, eval(m, x), m, 1.0, rngs, 0);
    CHECK((pre.inverse_all(z_new) - x_new).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("EKS leaves a collapsed ensemble in place") {
    Vector y(2);
    y << 1.0, 2.0;
    const ModelSpec m = test::identity_model(y);
    RowMatrix x(5, 2);
    for (Index i = 0; i < 5; ++i) x.row(i) << 0.3, -0.4;
    const RowMatrix out = eks_step(x, eval(m, x), m, Vector::Zero(2), Matrix::Identity(2, 2), 0.5,
                                   RngFactory(7), 0);
    CHECK((out - x).norm() < 1e-15);
  }

  TEST_CASE("EKS adaptive step in a scalar case") {
    // J = 2, F = (0, 2), y = 1, Γ = 1: F − F̄ = (−1, 1), F − y = (−1, 1),
    // D = ½ [[1, −1], [−1, 1]], ‖D‖_F = 1.
    ForwardBatch b;
    b.outputs.resize(2, 1);
    b.outputs << 0.0, 2.0;
    Vector y(1);
    y << 1.0;
    const NoiseCovariance g = NoiseCovariance::isotropic(1, 1.0);
    CHECK(eks_adaptive_dt(b, y, g) == doctest::Approx(1.0 / (1.0 + 1e-5)).epsilon(1e-14));
    // Doubling the residual offset while keeping the spread doubles ‖D‖ here:
    // F − y = (−2, 0) gives D = ½[[2, 0], [−2, 0]], ‖D‖_F = √2.
    y << 2.0;
    CHECK(eks_adaptive_dt(b, y, g) == doctest::Approx(1.0 / (std::sqrt(2.0) + 1e-5)).epsilon(1e-14));
  }

  TEST_CASE("EKS step solves the implicit system") {
    Vector y(2);
    y << 0.5, 1.0;
    const ModelSpec m = test::identity_model(y, 0.8);
    const RowMatrix x = test::normal_draws(8, 2, 8);
    const ForwardBatch b = eval(m, x);
    const double dt = 0.3;
    const RngFactory rngs(8);
    const RowMatrix out = eks_step(x, b, m, Vector::Zero(2), Matrix::Identity(2, 2), dt, rngs, 4);

    const Index j = 8;
    const Vector xm = x.colwise().mean().transpose();
    const Vector fm = b.outputs.colwise().mean().transpose();
    Matrix c = Matrix::Zero(2, 2);
    for (Index i = 0; i < j; ++i) {
      const Vector dx = x.row(i).transpose() - xm;
      c += dx * dx.transpose() / static_cast<double>(j);
    }
    const Eigen::LLT<Matrix> noise_chol(2.0 * dt * c);
    for (Index i = 0; i < j; ++i) {
      Vector drift = Vector::Zero(2);
      for (Index k = 0; k < j; ++k) {
        const double dki = (b.outputs.row(k).transpose() - fm)
                               .dot((b.outputs.row(i).transpose() - y) / 0.64) /
                           static_cast<double>(j);
        drift += dki * x.row(k).transpose();
      }
      const Vector rhs = x.row(i).transpose() - dt * drift +
                         dt * 3.0 / static_cast<double>(j) * (x.row(i).transpose() - xm);
      const Vector xhat = (Matrix::Identity(2, 2) + dt * c).lu().solve(rhs);
      // The added noise lies in the column space of sqrt(2Δt C); its size is
      // checked through the covariance-weighted norm.
      const Vector noise = out.row(i).transpose() - xhat;
      Rng rng = rngs.stream(Stream::kEksNoise, 4, 0, static_cast<std::uint64_t>(i));
      Vector xi(2);
      xi << standard_normal(rng), standard_normal(rng);
      CHECK(noise.dot(noise_chol.solve(noise)) == doctest::Approx(xi.squaredNorm()).epsilon(1e-8));
    }
  }
}
