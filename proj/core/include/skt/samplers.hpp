#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skt/annealing.hpp"
#include "skt/ensemble.hpp"
#include "skt/mcmc.hpp"

namespace skt {

enum class Scheme { kSkt, kNfSkt, kSmc, kNfSmc, kEki, kFaki, kEks };
enum class McmcKernel { kTpcn, kPcn };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);
std::string kernel_name(McmcKernel k);
McmcKernel parse_kernel(const std::string& s);

// Preconditioner implied by a scheme: affine for NF-*, FAKI and EKS.
std::string scheme_preconditioner(Scheme s);

struct RunConfig {
  Scheme scheme = Scheme::kSkt;
  McmcKernel kernel = McmcKernel::kTpcn;
  // Empty selects scheme_preconditioner(scheme); any other value must match it.
  std::string precond;
  Index ensemble_size = 0;  // 0 means 10·d
  double tau = kDefaultTau;
  double tau_corr = kDefaultTauCorr;
  // Per-level sweep cap; 0 selects 50 for SKT schemes and 51 for SMC schemes.
  int max_sweeps = 0;
  // Run exactly max_sweeps sweeps per level instead of stopping on
  // decorrelation.
  bool fixed_sweeps = false;
  double alpha_star = kDefaultAlphaStar;
  double rho_init = 1.0;
  CorrStatistic corr_statistic = CorrStatistic::kXPlusXSquared;
  int t_fit_max_iter = 200;
  double t_fit_tol = 1e-8;
  int eks_steps = 100;
  int max_levels = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  // Called with (level, beta, states) after the prior draw (level 0) and at
  // the end of every level.
  std::function<void(int, double, const RowMatrix&)> on_level;

  // Resolves defaults against the model dimension and validates
  // combinations. Throws ConfigError.
  RunConfig resolved(Index dim) const;
  int effective_max_sweeps() const;
};

struct LevelRecord {
  double beta = 0.0;
  double ess = 0.0;
  int sweeps = 0;
  bool hit_cap = false;
  double nu = 0.0;  // fitted degrees of freedom (tpCN)
  std::vector<double> acceptance;  // ensemble-mean acceptance per sweep
  std::vector<double> rho;         // step size after each sweep's adaptation
};

struct RunResult {
  std::string scheme;
  std::string kernel;
  std::string precond;
  Index ensemble_size = 0;
  double tau = 0.0;
  double tau_corr = 0.0;
  RowMatrix final_ensemble;
  std::vector<double> betas;
  std::vector<LevelRecord> levels;
  std::uint64_t n_model_evals = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;

  int n_levels() const { return static_cast<int>(betas.size()); }
  double evals_per_particle() const {
    return ensemble_size ? static_cast<double>(n_model_evals) / static_cast<double>(ensemble_size) : 0.0;
  }
  int total_sweeps() const;
};

RunResult run_skt(const ModelSpec& model, const RunConfig& config);
RunResult run_smc(const ModelSpec& model, const RunConfig& config);
RunResult run_kalman_only(const ModelSpec& model, const RunConfig& config);
// Dispatches on config.scheme.
RunResult run(const ModelSpec& model, const RunConfig& config);

}  // namespace skt
