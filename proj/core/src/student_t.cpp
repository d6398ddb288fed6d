#include "skt/student_t.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <numbers>

namespace skt {

namespace {

double log_density_from_mahalanobis(double q, double nu, double d, double log_det) {
  return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
         0.5 * d * std::log(nu * std::numbers::pi) - 0.5 * log_det -
         0.5 * (nu + d) * std::log1p(q / nu);
}

Vector mahalanobis_all(const RowMatrix& x, const Vector& mu, const CholeskyFactor& chol) {
  Matrix centered = (x.rowwise() - mu.transpose()).transpose();
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(centered);
  return centered.colwise().squaredNorm().transpose();
}

double observed_loglik(const Vector& delta, double nu, double d, double log_det) {
  double s = 0.0;
  for (Index i = 0; i < delta.size(); ++i)
    s += log_density_from_mahalanobis(delta(i), nu, d, log_det);
  return s;
}

// Twice the per-sample derivative of the observed log-likelihood in nu,
// written as the usual ECME stationarity condition.
double nu_score(double nu, const Vector& delta, double d) {
  using boost::math::digamma;
  double mean_term = 0.0;
  for (Index i = 0; i < delta.size(); ++i) {
    const double u = (nu + d) / (nu + delta(i));
    mean_term += std::log(u) - u;
  }
  mean_term /= static_cast<double>(delta.size());
  return -digamma(0.5 * nu) + std::log(0.5 * nu) + 1.0 + mean_term + digamma(0.5 * (nu + d)) -
         std::log(0.5 * (nu + d));
}

struct NuStep {
  double nu;
  bool at_bound;
};

NuStep solve_nu(const Vector& delta, double d) {
  double lo = std::log(kNuMin);
  double hi = std::log(kNuMax);
  const double s_lo = nu_score(kNuMin, delta, d);
  const double s_hi = nu_score(kNuMax, delta, d);
  if (s_lo <= 0.0 && s_hi <= 0.0) return {kNuMin, true};
  if (s_lo >= 0.0 && s_hi >= 0.0) return {kNuMax, true};
  // The score decreases through the root (likelihood maximum).
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (nu_score(std::exp(mid), delta, d) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {std::exp(0.5 * (lo + hi)), false};
}

}  // namespace

double t_log_density(const Vector& x, double nu, const Vector& mu, const Matrix& scale) {
  const CholeskyFactor chol = jittered_cholesky(scale);
  const double q = chol.whiten(x - mu).squaredNorm();
  return log_density_from_mahalanobis(q, nu, static_cast<double>(x.size()), chol.log_det());
}

double t_log_density(const Vector& x, const TDistParams& p) {
  return log_density_from_mahalanobis(p.mahalanobis(x), p.nu, static_cast<double>(x.size()),
                                      p.chol.log_det());
}

TFitReport fit_multivariate_t(const RowMatrix& samples, int max_iter, double tol) {
  const Index n = samples.rows();
  const Index dim = samples.cols();
  if (n < 2) throw ConfigError("t fit needs at least two samples");
  if (!samples.allFinite()) throw NumericalError("t fit: non-finite samples");
  const double d = static_cast<double>(dim);
  const double jn = static_cast<double>(n);

  Vector mu = samples.colwise().mean().transpose();
  const RowMatrix c0 = samples.rowwise() - mu.transpose();
  Matrix scale = (c0.transpose() * c0) / jn;
  double nu = 10.0;

  TFitReport report;
  CholeskyFactor chol = jittered_cholesky(scale);
  Vector delta = mahalanobis_all(samples, mu, chol);
  double loglik = observed_loglik(delta, nu, d, chol.log_det());
  report.loglik_trace.push_back(loglik);

  bool tol_met = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    // E-step weights under the current parameters.
    const Vector u = ((nu + d) / (delta.array() + nu)).matrix();

    // CM-step for location and scale.
    mu = (samples.transpose() * u) / u.sum();
    const RowMatrix centered = samples.rowwise() - mu.transpose();
    scale = (centered.transpose() * u.asDiagonal() * centered) / jn;
    scale = 0.5 * (scale + scale.transpose());
    chol = jittered_cholesky(scale);
    delta = mahalanobis_all(samples, mu, chol);

    // CM-step for nu against the observed likelihood.
    const NuStep step = solve_nu(delta, d);
    nu = step.nu;
    report.nu_at_bound = step.at_bound;

    const double next = observed_loglik(delta, nu, d, chol.log_det());
    report.loglik_trace.push_back(next);
    const double change = std::abs(next - loglik) / std::max(1.0, std::abs(next));
    loglik = next;
    if (change < tol) {
      tol_met = true;
      ++it;
      break;
    }
  }

  report.params = TDistParams::make(nu, mu, scale, 1.0);
  report.iterations = it;
  report.final_loglik = loglik;
  report.converged = tol_met && chol.jitter == 0.0;
  return report;
}

}  // namespace skt
