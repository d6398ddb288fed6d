#pragma once

#include <vector>

#include "skt/rng.hpp"
#include "skt/types.hpp"

namespace skt {

inline constexpr double kDefaultTau = 0.5;
inline constexpr double kDefaultTauCorr = 0.1;

// log w_i = −(beta_next − beta_n) Φ_i, unnormalised.
Vector importance_log_weights(const Vector& misfits, double beta_n, double beta_next);

// Normalised weights from log weights (log-sum-exp stabilised).
Vector normalize_log_weights(const Vector& log_weights);

// (Σw)² / Σw², computed stably from log weights.
double effective_sample_size(const Vector& log_weights);

// ESS of the incremental weights for a step from beta_n to beta_next.
double ess_at(const Vector& misfits, double beta_n, double beta_next);

struct BetaSolve {
  double beta = 1.0;
  double ess = 0.0;
  int iterations = 0;
};

// Next inverse temperature: the beta in (beta_n, 1] with ESS = tau·J, or
// exactly 1 when the full step keeps ESS ≥ tau·J. Bisection on the
// increment stops once the ESS residual is below 1e-9·J or the bracket is
// narrower than 1e-14, after at most 200 halvings.
BetaSolve solve_next_beta(const Vector& misfits, double beta_n, double tau);

// Systematic resampling with a single uniform u ~ U[0,1): the comb
// (u + i)/J, i = 0..J−1, is matched against the cumulative weights. Returns
// ancestor indices in comb order. Weights are renormalised; negative weights
// throw.
std::vector<Index> systematic_resample(const Vector& weights, Rng& rng);
// Deterministic core used by the above.
std::vector<Index> systematic_resample(const Vector& weights, double u);

enum class CorrStatistic { kXPlusXSquared, kX };

// Pearson correlation across particles, per dimension, of the monitored
// statistic between two successive ensembles. Zero variance gives 0.
Vector sweep_correlations(const RowMatrix& prev_states, const RowMatrix& new_states,
                          CorrStatistic statistic = CorrStatistic::kXPlusXSquared);

struct CorrUpdate {
  Vector products;
  bool stop = false;
};

// Multiplies this sweep's correlations into the running products; stop is
// true when every product has fallen below tau_corr.
CorrUpdate update_corr_products(const RowMatrix& prev_states, const RowMatrix& new_states,
                                const Vector& corr_products, double tau_corr,
                                CorrStatistic statistic = CorrStatistic::kXPlusXSquared);
CorrUpdate accumulate_corr(const Vector& correlations, const Vector& corr_products,
                           double tau_corr);

}  // namespace skt
