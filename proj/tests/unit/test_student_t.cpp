#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "skt/student_t.hpp"
#include "support.hpp"

using namespace skt;

namespace {

// Draws from t_nu(mu, scale) as mu + L w / sqrt(g/nu), g ~ chi²_nu.
RowMatrix t_draws(Index n, double nu, const Vector& mu, const Matrix& scale, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix l = scale.llt().matrixL();
  std::chi_squared_distribution<double> chi(nu);
  RowMatrix x(n, mu.size());
  for (Index i = 0; i < n; ++i) {
    Vector w(mu.size());
    for (Index k = 0; k < mu.size(); ++k) w(k) = standard_normal(rng);
    const double g = chi(rng);
    x.row(i) = (mu + l * w / std::sqrt(g / nu)).transpose();
  }
  return x;
}

}  // namespace

TEST_SUITE("student_t") {
  TEST_CASE("univariate Cauchy density at its mode") {
    const Vector zero = Vector::Zero(1);
    CHECK(t_log_density(zero, 1.0, zero, Matrix::Identity(1, 1)) ==
          doctest::Approx(-std::log(std::numbers::pi)).epsilon(1e-14));
  }

  TEST_CASE("large nu approaches the Gaussian density") {
    Vector x(2);
    x << 0.7, -1.2;
    Matrix s(2, 2);
    s << 1.5, 0.4, 0.4, 0.9;
    const double gauss =
        -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(s.determinant()) - 0.5 * x.dot(s.inverse() * x);
    CHECK(t_log_density(x, 1e6, Vector::Zero(2), s) == doctest::Approx(gauss).epsilon(1e-5));
  }

  TEST_CASE("density integrates to one in three dimensions") {
    // Radial quadrature: ∫ p = (surface of S²)·|L| ∫ r² p(r) dr after whitening.
    const double nu = 3.0;
    Matrix s(3, 3);
    s << 2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5;
    const Matrix l = s.llt().matrixL();
    const Vector mu = Vector::Constant(3, 0.4);
    double integral = 0.0;
    const int n = 200000;
    // Substitution r = tan(θ) maps [0, ∞) onto [0, π/2).
    const double h = (std::numbers::pi / 2.0) / n;
    for (int i = 0; i < n; ++i) {
      const double th = (i + 0.5) * h;
      const double r = std::tan(th);
      const Vector x = mu + l * (Vector::Unit(3, 0) * r);
      const double p = std::exp(t_log_density(x, nu, mu, s));
      integral += 4.0 * std::numbers::pi * r * r * p * l.determinant() / (std::cos(th) * std::cos(th)) * h;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("ECME recovers known parameters") {
    Vector mu(2);
    mu << 1.0, -1.0;
    Matrix c(2, 2);
    c << 2.0, 0.5, 0.5, 1.0;
    const RowMatrix x = t_draws(50000, 5.0, mu, c, 17);
    const TFitReport fit = fit_multivariate_t(x);
    CHECK(fit.converged);
    CHECK_FALSE(fit.nu_at_bound);
    CHECK(std::abs(fit.params.nu - 5.0) < 0.5);
    CHECK((fit.params.mu - mu).cwiseAbs().maxCoeff() < 0.05);
    CHECK((fit.params.scale - c).cwiseAbs().maxCoeff() < 0.1);
    CHECK(fit.params.rho == 1.0);
  }

  TEST_CASE("log-likelihood trace never decreases") {
    const RowMatrix x = t_draws(3000, 2.5, Vector::Zero(3), Matrix::Identity(3, 3), 18);
    const TFitReport fit = fit_multivariate_t(x);
    REQUIRE(fit.loglik_trace.size() >= 2);
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k)
      CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1] - 1e-9 * std::abs(fit.loglik_trace[k - 1]));
    CHECK(fit.final_loglik == doctest::Approx(fit.loglik_trace.back()));
    // Independent recomputation of the reported likelihood.
    double ll = 0.0;
    for (Index i = 0; i < x.rows(); ++i) ll += t_log_density(x.row(i).transpose(), fit.params);
    CHECK(ll == doctest::Approx(fit.final_loglik).epsilon(1e-9));
  }

  TEST_CASE("Gaussian data push nu to its upper bound") {
    const RowMatrix x = test::normal_draws(20000, 2, 19);
    const TFitReport fit = fit_multivariate_t(x);
    CHECK(fit.params.nu > 50.0);
    CHECK((fit.params.scale - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
  }

  TEST_CASE("fit is affine equivariant") {
    const RowMatrix x = t_draws(5000, 4.0, Vector::Zero(2), Matrix::Identity(2, 2), 20);
    Matrix a(2, 2);
    a << 2.0, 0.5, -0.3, 1.0;
    Vector b(2);
    b << 3.0, -1.0;
    RowMatrix y = (x * a.transpose()).rowwise() + b.transpose();
    const TFitReport fx = fit_multivariate_t(x);
    const TFitReport fy = fit_multivariate_t(y);
    CHECK(fy.params.nu == doctest::Approx(fx.params.nu).epsilon(1e-4));
    CHECK((fy.params.mu - (a * fx.params.mu + b)).norm() < 1e-5);
    CHECK((fy.params.scale - a * fx.params.scale * a.transpose()).norm() < 1e-4);
  }

  TEST_CASE("two-particle fit degrades gracefully") {
    RowMatrix x(2, 2);
    x << 0.0, 0.0, 1.0, 1.0;
    const TFitReport fit = fit_multivariate_t(x);
    CHECK_FALSE(fit.converged);
    CHECK(fit.params.mu.allFinite());
    CHECK(fit.params.scale.allFinite());
    CHECK(fit.params.chol.lower.allFinite());
  }
}
