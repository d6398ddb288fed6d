#include "skt/mcmc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "skt/log.hpp"

namespace skt {

namespace {

// A proposal plus log[ref(x) / ref(x')], the reference-density correction that
// makes the accept ratio reversible.
struct Proposal {
  Vector x;
  double log_ref_correction;
};

Vector gaussian_draw(const Matrix& lower, Rng& rng) {
  Vector n(lower.rows());
  for (Index k = 0; k < n.size(); ++k) n(k) = standard_normal(rng);
  return lower.triangularView<Eigen::Lower>() * n;
}

Proposal propose(const Vector& x, const PcnParams& p, Rng& rng) {
  const double rho = p.rho;
  const Vector w = gaussian_draw(p.chol.lower, rng);
  Vector xp = p.mu + std::sqrt(1.0 - rho * rho) * (x - p.mu) + rho * w;
  const double qx = p.chol.whiten(x - p.mu).squaredNorm();
  const double qp = p.chol.whiten(xp - p.mu).squaredNorm();
  return {std::move(xp), -0.5 * qx + 0.5 * qp};
}

Proposal propose(const Vector& x, const TDistParams& p, Rng& rng) {
  const double d = static_cast<double>(x.size());
  const double rho = p.rho;
  const double qx = p.mahalanobis(x);
  std::gamma_distribution<double> gamma((d + p.nu) / 2.0, 2.0 / (p.nu + qx));
  const double z_inv = gamma(rng);
  const Vector w = gaussian_draw(p.chol.lower, rng);
  Vector xp = p.mu + std::sqrt(1.0 - rho * rho) * (x - p.mu) + (rho / std::sqrt(z_inv)) * w;
  const double qp = p.mahalanobis(xp);
  const double e = -(d + p.nu) / 2.0;
  return {std::move(xp), e * std::log1p(qx / p.nu) - e * std::log1p(qp / p.nu)};
}

Proposal propose(const Vector& x, const KernelParams& params, Rng& rng) {
  return std::visit([&](const auto& p) { return propose(x, p, rng); }, params);
}

// Consumes the uniform unconditionally. Returns (accepted, alpha).
std::pair<bool, double> accept_test(double log_alpha, Rng& rng) {
  const double u = uniform01(rng);
  if (!std::isfinite(log_alpha)) {
    // +inf cannot occur with a finite current state; NaN or −inf reject.
    return {log_alpha > 0.0, log_alpha > 0.0 ? 1.0 : 0.0};
  }
  const double alpha = log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
  return {log_alpha >= 0.0 || std::log(u) < log_alpha, alpha};
}

template <class Params>
StepResult generic_step(const ChainState& current, const LogTarget& log_target,
                        const Params& params, Rng& rng) {
  Proposal prop = propose(current.x, params, rng);
  double lp = -std::numeric_limits<double>::infinity();
  try {
    lp = log_target(prop.x);
  } catch (const ModelDomainError&) {
  }
  double log_alpha = -std::numeric_limits<double>::infinity();
  if (std::isfinite(lp)) log_alpha = lp - current.log_target + prop.log_ref_correction;
  const auto [accepted, alpha] = accept_test(log_alpha, rng);
  if (!accepted) return {current, false, alpha};
  return {ChainState{std::move(prop.x), lp}, true, alpha};
}

}  // namespace

PcnParams PcnParams::make(Vector mu, Matrix cov, double rho) {
  if (mu.size() != cov.rows() || cov.rows() != cov.cols())
    throw ConfigError("pCN reference mean and covariance shapes disagree");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("pCN step size must lie in (0, 1]");
  PcnParams p;
  p.chol = jittered_cholesky(cov);
  p.mu = std::move(mu);
  p.cov = std::move(cov);
  p.rho = rho;
  return p;
}

TDistParams TDistParams::make(double nu, Vector mu, Matrix scale, double rho) {
  if (mu.size() != scale.rows() || scale.rows() != scale.cols())
    throw ConfigError("t reference mean and scale shapes disagree");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("tpCN step size must lie in (0, 1]");
  if (!(nu > 0.0)) throw ConfigError("degrees of freedom must be positive");
  TDistParams p;
  p.nu = std::clamp(nu, kNuMin, kNuMax);
  p.chol = jittered_cholesky(scale);
  p.mu = std::move(mu);
  p.scale = std::move(scale);
  p.rho = rho;
  return p;
}

double TDistParams::mahalanobis(const Vector& x) const { return chol.whiten(x - mu).squaredNorm(); }

StepResult pcn_step(const ChainState& current, const LogTarget& log_target,
                    const PcnParams& params, Rng& rng) {
  return generic_step(current, log_target, params, rng);
}

StepResult tpcn_step(const ChainState& current, const LogTarget& log_target,
                     const TDistParams& params, Rng& rng) {
  return generic_step(current, log_target, params, rng);
}

StepResult kernel_step(const ChainState& current, const LogTarget& log_target,
                       const KernelParams& params, Rng& rng) {
  return std::visit([&](const auto& p) { return generic_step(current, log_target, p, rng); },
                    params);
}

double latent_log_target(const ModelSpec& model, const Preconditioner& precond, const Vector& z,
                         double misfit, double beta) {
  const Vector x = precond.inverse(z);
  return annealed_log_target(model, x, misfit, beta) + precond.log_det_jacobian_inverse(z);
}

LatentStepResult latent_step(const LatentState& current, const Preconditioner& precond,
                             const ModelSpec& model, double beta, const KernelParams& params,
                             Rng& rng, EvalCounter& counter) {
  Proposal prop = propose(current.z, params, rng);
  double log_alpha = -std::numeric_limits<double>::infinity();
  LatentState next;

  const Vector x = precond.inverse(prop.x);
  if (!x.allFinite()) {
    warn("preconditioner inverse map produced a non-finite state; proposal rejected");
  } else {
    ++counter.count;
    try {
      next.output = model.forward(x);
      if (next.output.allFinite()) {
        next.misfit = misfit(model, next.output);
        next.log_target = annealed_log_target(model, x, next.misfit, beta) +
                          precond.log_det_jacobian_inverse(prop.x);
        if (std::isfinite(next.log_target))
          log_alpha = next.log_target - current.log_target + prop.log_ref_correction;
      }
    } catch (const ModelDomainError&) {
    }
  }

  const auto [accepted, alpha] = accept_test(log_alpha, rng);
  if (!accepted) return {current, false, alpha};
  next.z = std::move(prop.x);
  return {std::move(next), true, alpha};
}

LatentStepResult tpcn_latent_step(const LatentState& current, const Preconditioner& precond,
                                  const ModelSpec& model, double beta,
                                  const TDistParams& params, Rng& rng, EvalCounter& counter) {
  return latent_step(current, precond, model, beta, KernelParams{params}, rng, counter);
}

namespace {

template <class Params>
Params adapt_common(Params params, const KernelStats& stats, const Vector& ensemble_mean, int m,
                    double alpha_star) {
  if (m < 1) throw ConfigError("adaptation index must be at least 1");
  const double log_rho = std::log(params.rho) + (stats.mean_accept - alpha_star) / m;
  params.rho = std::clamp(std::exp(log_rho), kRhoMin, 1.0);
  params.mu += (ensemble_mean - params.mu) / static_cast<double>(m);
  return params;
}

}  // namespace

PcnParams adapt_kernel(PcnParams params, const KernelStats& stats, const Vector& ensemble_mean,
                       int m, double alpha_star) {
  return adapt_common(std::move(params), stats, ensemble_mean, m, alpha_star);
}

TDistParams adapt_kernel(TDistParams params, const KernelStats& stats,
                         const Vector& ensemble_mean, int m, double alpha_star) {
  return adapt_common(std::move(params), stats, ensemble_mean, m, alpha_star);
}

KernelParams adapt_kernel(const KernelParams& params, const KernelStats& stats,
                          const Vector& ensemble_mean, int m, double alpha_star) {
  return std::visit(
      [&](const auto& p) -> KernelParams {
        return adapt_common(p, stats, ensemble_mean, m, alpha_star);
      },
      params);
}

double kernel_rho(const KernelParams& params) {
  return std::visit([](const auto& p) { return p.rho; }, params);
}

}  // namespace skt
