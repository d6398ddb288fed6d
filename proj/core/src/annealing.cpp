#include "skt/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skt {

Vector importance_log_weights(const Vector& misfits, double beta_n, double beta_next) {
  if (beta_next < beta_n) throw ConfigError("importance weights: beta must not decrease");
  return -(beta_next - beta_n) * misfits;
}

Vector normalize_log_weights(const Vector& log_weights) {
  const double m = log_weights.maxCoeff();
  Vector w = (log_weights.array() - m).exp().matrix();
  return w / w.sum();
}

double effective_sample_size(const Vector& log_weights) {
  const double m = log_weights.maxCoeff();
  const Eigen::ArrayXd shifted = log_weights.array() - m;
  const double s1 = shifted.exp().sum();
  const double s2 = (2.0 * shifted).exp().sum();
  return s1 * s1 / s2;
}

double ess_at(const Vector& misfits, double beta_n, double beta_next) {
  return effective_sample_size(importance_log_weights(misfits, beta_n, beta_next));
}

BetaSolve solve_next_beta(const Vector& misfits, double beta_n, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (misfits.size() < 2) throw ConfigError("temperature solve needs at least two particles");
  if (!misfits.allFinite()) throw NumericalError("temperature solve: non-finite misfits");
  if (beta_n >= 1.0) return {1.0, ess_at(misfits, 1.0, 1.0), 0};

  const double jn = static_cast<double>(misfits.size());
  const double target = tau * jn;
  const double ess_full = ess_at(misfits, beta_n, 1.0);
  if (ess_full >= target) return {1.0, ess_full, 0};

  double lo = 0.0;
  double hi = 1.0 - beta_n;
  double ess_lo = jn;
  double ess_hi = ess_full;
  int it = 0;
  for (; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = effective_sample_size(-mid * misfits);
    if (std::abs(e - target) <= 1e-9 * jn) {
      lo = hi = mid;
      ess_lo = ess_hi = e;
      break;
    }
    if (e > target) {
      lo = mid;
      ess_lo = e;
    } else {
      hi = mid;
      ess_hi = e;
    }
    if (hi - lo < 1e-14) break;
  }
  const double delta = std::abs(ess_lo - target) <= std::abs(ess_hi - target) ? lo : hi;
  double beta = beta_n + delta;
  if (beta >= 1.0 - 1e-8) beta = 1.0;
  return {beta, ess_at(misfits, beta_n, beta), it};
}

std::vector<Index> systematic_resample(const Vector& weights, double u) {
  const Index n = weights.size();
  if (n == 0) return {};
  if ((weights.array() < 0.0).any()) throw NumericalError("resampling: negative weight");
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("resampling: weights do not sum to a positive value");

  std::vector<Index> ancestors(static_cast<std::size_t>(n));
  const double jn = static_cast<double>(n);
  double cumulative = weights(0) / total;
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    const double comb = (u + static_cast<double>(i)) / jn;
    while (comb >= cumulative && k < n - 1) {
      ++k;
      cumulative += weights(k) / total;
    }
    ancestors[static_cast<std::size_t>(i)] = k;
  }
  return ancestors;
}

std::vector<Index> systematic_resample(const Vector& weights, Rng& rng) {
  return systematic_resample(weights, uniform01(rng));
}

Vector sweep_correlations(const RowMatrix& prev_states, const RowMatrix& new_states,
                          CorrStatistic statistic) {
  if (prev_states.rows() != new_states.rows() || prev_states.cols() != new_states.cols())
    throw ConfigError("correlation update: ensemble shapes differ");
  const Index d = prev_states.cols();
  auto stat = [statistic](const auto& col) -> Eigen::ArrayXd {
    const Eigen::ArrayXd x = col.array();
    return statistic == CorrStatistic::kX ? x : Eigen::ArrayXd(x + x.square());
  };
  Vector rho(d);
  for (Index j = 0; j < d; ++j) {
    const Eigen::ArrayXd a = stat(prev_states.col(j));
    const Eigen::ArrayXd b = stat(new_states.col(j));
    const Eigen::ArrayXd ac = a - a.mean();
    const Eigen::ArrayXd bc = b - b.mean();
    const double saa = ac.square().sum();
    const double sbb = bc.square().sum();
    if (saa <= 0.0 || sbb <= 0.0) {
      rho(j) = 0.0;
    } else {
      rho(j) = (ac * bc).sum() / std::sqrt(saa * sbb);
    }
  }
  return rho;
}

CorrUpdate accumulate_corr(const Vector& correlations, const Vector& corr_products,
                           double tau_corr) {
  CorrUpdate out;
  out.products = corr_products.cwiseProduct(correlations);
  out.stop = (out.products.array() < tau_corr).all();
  return out;
}

CorrUpdate update_corr_products(const RowMatrix& prev_states, const RowMatrix& new_states,
                                const Vector& corr_products, double tau_corr,
                                CorrStatistic statistic) {
  return accumulate_corr(sweep_correlations(prev_states, new_states, statistic), corr_products,
                         tau_corr);
}

}  // namespace skt
