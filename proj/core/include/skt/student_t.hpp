#pragma once

#include <vector>

#include "skt/mcmc.hpp"
#include "skt/types.hpp"

namespace skt {

// Normalised log density of t_nu(mu, scale) at x.
double t_log_density(const Vector& x, double nu, const Vector& mu, const Matrix& scale);
double t_log_density(const Vector& x, const TDistParams& params);

struct TFitReport {
  TDistParams params;  // rho left at 1
  int iterations = 0;
  double final_loglik = 0.0;
  // False when the tolerance was not met or the scale needed jitter.
  bool converged = false;
  // The nu root was not bracketed and the fit sits at kNuMin or kNuMax.
  bool nu_at_bound = false;
  std::vector<double> loglik_trace;
};

// ECME fit of a multivariate t to the rows of samples: EM updates of the
// location and scale, then nu maximising the observed-data likelihood with
// location and scale held fixed (bisection in log nu over [kNuMin, kNuMax]).
// Stops when the relative log-likelihood change falls below tol.
TFitReport fit_multivariate_t(const RowMatrix& samples, int max_iter = 200, double tol = 1e-8);

}  // namespace skt
