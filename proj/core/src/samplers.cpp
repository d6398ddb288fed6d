#include "skt/samplers.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include "skt/kalman.hpp"
#include "skt/log.hpp"
#include "skt/preconditioner.hpp"
#include "skt/student_t.hpp"

namespace skt {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kSkt: return "SKT";
    case Scheme::kNfSkt: return "NF-SKT";
    case Scheme::kSmc: return "SMC";
    case Scheme::kNfSmc: return "NF-SMC";
    case Scheme::kEki: return "EKI";
    case Scheme::kFaki: return "FAKI";
    case Scheme::kEks: return "EKS";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  for (Scheme v : {Scheme::kSkt, Scheme::kNfSkt, Scheme::kSmc, Scheme::kNfSmc, Scheme::kEki,
                   Scheme::kFaki, Scheme::kEks})
    if (scheme_name(v) == s) return v;
  throw ConfigError("unknown scheme '" + s + "' (expected SKT|NF-SKT|SMC|NF-SMC|EKI|FAKI|EKS)");
}

std::string kernel_name(McmcKernel k) { return k == McmcKernel::kTpcn ? "tpCN" : "pCN"; }

McmcKernel parse_kernel(const std::string& s) {
  if (s == "tpCN") return McmcKernel::kTpcn;
  if (s == "pCN") return McmcKernel::kPcn;
  throw ConfigError("unknown kernel '" + s + "' (expected tpCN|pCN)");
}

std::string scheme_preconditioner(Scheme s) {
  switch (s) {
    case Scheme::kNfSkt:
    case Scheme::kNfSmc:
    case Scheme::kFaki:
    case Scheme::kEks:
      return "affine";
    default:
      return "identity";
  }
}

namespace {
bool is_smc(Scheme s) { return s == Scheme::kSmc || s == Scheme::kNfSmc; }
}  // namespace

int RunConfig::effective_max_sweeps() const {
  if (max_sweeps > 0) return max_sweeps;
  return is_smc(scheme) ? 51 : 50;
}

RunConfig RunConfig::resolved(Index dim) const {
  RunConfig c = *this;
  if (c.ensemble_size == 0) c.ensemble_size = 10 * dim;
  if (c.ensemble_size < 2) throw ConfigError("ensemble size must be at least 2");
  const std::string implied = scheme_preconditioner(c.scheme);
  if (c.precond.empty()) c.precond = implied;
  if (c.precond != implied)
    throw ConfigError("scheme " + scheme_name(c.scheme) + " runs with precond=" + implied +
                      ", not " + c.precond);
  if (!(c.tau > 0.0 && c.tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (!(c.tau_corr > 0.0 && c.tau_corr <= 1.0)) throw ConfigError("tau_corr must lie in (0, 1]");
  if (c.max_sweeps < 0) throw ConfigError("max_sweeps must be non-negative");
  c.max_sweeps = c.effective_max_sweeps();
  if (!(c.alpha_star > 0.0 && c.alpha_star < 1.0)) throw ConfigError("alpha_star must lie in (0, 1)");
  if (!(c.rho_init > 0.0 && c.rho_init <= 1.0)) throw ConfigError("rho_init must lie in (0, 1]");
  if (c.eks_steps < 1) throw ConfigError("eks_steps must be positive");
  if (c.max_levels < 1) throw ConfigError("max_levels must be positive");
  if (c.t_fit_max_iter < 1 || !(c.t_fit_tol > 0.0)) throw ConfigError("invalid t-fit settings");
  return c;
}

int RunResult::total_sweeps() const {
  int s = 0;
  for (const auto& l : levels) s += l.sweeps;
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

// Per-coordinate latent variance and step size beyond which EKS is flagged.
constexpr double kEksSpreadLimit = 1e2;
constexpr double kEksMinDt = 1e-10;

struct Context {
  const ModelSpec& model;
  const RunConfig& cfg;
  Executor exec;
  RngFactory rngs;
  EvalCounter counter;
  RunResult& result;

  void warning(const std::string& msg) {
    warn(msg);
    result.warnings.push_back(msg);
  }
};

RunResult start_result(const RunConfig& cfg) {
  RunResult r;
  r.scheme = scheme_name(cfg.scheme);
  r.kernel = kernel_name(cfg.kernel);
  r.precond = cfg.precond;
  r.ensemble_size = cfg.ensemble_size;
  r.tau = cfg.tau;
  r.tau_corr = cfg.tau_corr;
  return r;
}

KernelParams fit_kernel(const Context& ctx, const RowMatrix& z, double rho, LevelRecord& rec) {
  if (ctx.cfg.kernel == McmcKernel::kTpcn) {
    TFitReport fit = fit_multivariate_t(z, ctx.cfg.t_fit_max_iter, ctx.cfg.t_fit_tol);
    rec.nu = fit.params.nu;
    fit.params.rho = rho;
    return fit.params;
  }
  const Moments m = ensemble_moments(z);
  return PcnParams::make(m.mean, m.cov, rho);
}

// MCMC sweeps at inverse temperature beta in the latent space of precond.
// x and batch are updated in place; rho carries the adapted step size.
void sample_level(Context& ctx, const Preconditioner& precond, double beta, int level,
                  RowMatrix& x, ForwardBatch& batch, double& rho, LevelRecord& rec) {
  const Index n = x.rows();
  const Index d = x.cols();
  RowMatrix z = precond.forward_all(x);
  KernelParams params = fit_kernel(ctx, z, rho, rec);

  std::vector<LatentState> states(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    LatentState& s = states[static_cast<std::size_t>(i)];
    s.z = z.row(i).transpose();
    s.output = batch.outputs.row(i).transpose();
    s.misfit = batch.misfits(i);
    s.log_target = latent_log_target(ctx.model, precond, s.z, s.misfit, beta);
  }

  const int max_sweeps = ctx.cfg.max_sweeps;
  Vector products = Vector::Ones(d);
  bool stopped = false;
  std::vector<double> alphas(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> evals(static_cast<std::size_t>(n));

  for (int m = 1; m <= max_sweeps; ++m) {
    const RowMatrix prev = z;
    ctx.exec.parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      Rng rng = ctx.rngs.stream(Stream::kMcmc, static_cast<std::uint64_t>(level),
                                static_cast<std::uint64_t>(m), i);
      EvalCounter local;
      LatentStepResult r = latent_step(states[i], precond, ctx.model, beta, params, rng, local);
      states[i] = std::move(r.state);
      alphas[i] = r.alpha;
      evals[i] = local.count;
    });

    KernelStats stats;
    for (Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      z.row(i) = states[k].z.transpose();
      stats.mean_accept += alphas[k];
      ctx.counter.count += evals[k];
    }
    stats.mean_accept /= static_cast<double>(n);
    stats.proposal_count = static_cast<std::uint64_t>(n);

    params = adapt_kernel(params, stats, z.colwise().mean().transpose(), m, ctx.cfg.alpha_star);
    rec.acceptance.push_back(stats.mean_accept);
    rec.rho.push_back(kernel_rho(params));
    rec.sweeps = m;

    const CorrUpdate cu =
        update_corr_products(prev, z, products, ctx.cfg.tau_corr, ctx.cfg.corr_statistic);
    products = cu.products;
    if (!ctx.cfg.fixed_sweeps && cu.stop) {
      stopped = true;
      break;
    }
  }
  if (!ctx.cfg.fixed_sweeps && !stopped) {
    rec.hit_cap = true;
    ctx.warning("level " + std::to_string(level) + " reached the sweep cap of " +
                std::to_string(max_sweeps) + " before decorrelating");
  }
  rho = kernel_rho(params);

  x = precond.inverse_all(z);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    batch.outputs.row(i) = states[k].output.transpose();
    batch.misfits(i) = states[k].misfit;
  }
}

void require_finite(const RowMatrix& x, const std::string& what) {
  if (!x.allFinite()) throw NumericalError(what + " produced non-finite particle states");
}

void notify(const RunConfig& cfg, int level, double beta, const RowMatrix& x) {
  if (cfg.on_level) cfg.on_level(level, beta, x);
}

void check_size(Context& ctx) {
  if (ctx.cfg.ensemble_size < 2 * ctx.model.dim && ctx.cfg.kernel == McmcKernel::kTpcn &&
      ctx.cfg.scheme != Scheme::kEki && ctx.cfg.scheme != Scheme::kFaki &&
      ctx.cfg.scheme != Scheme::kEks)
    ctx.warning("ensemble size " + std::to_string(ctx.cfg.ensemble_size) +
                " is below 2d; the multivariate t fit may be unstable");
}

// Shared driver for SKT, SMC, EKI and FAKI: everything differs only in how a
// level moves the ensemble from beta_n to beta_{n+1}.
enum class LevelMove { kKalman, kResample };

RunResult annealed_run(const ModelSpec& model, const RunConfig& config, LevelMove move,
                       bool with_mcmc) {
  model.validate();
  const RunConfig cfg = config.resolved(model.dim);
  const auto t0 = Clock::now();
  RunResult result = start_result(cfg);
  Context ctx{model, cfg, Executor(cfg.workers), RngFactory(cfg.seed), EvalCounter{}, result};
  check_size(ctx);

  const Index n = cfg.ensemble_size;
  RowMatrix x = sample_prior(model, n, ctx.rngs);
  ForwardBatch batch = evaluate_ensemble(model, x, ctx.counter, ctx.exec);
  notify(cfg, 0, 0.0, x);

  std::unique_ptr<Preconditioner> precond = make_preconditioner(cfg.precond);
  double beta = 0.0;
  double rho = cfg.rho_init;
  int level = 0;
  while (beta < 1.0) {
    if (++level > cfg.max_levels)
      throw NumericalError("annealing did not reach beta = 1 within " +
                           std::to_string(cfg.max_levels) + " levels");
    const BetaSolve bs = solve_next_beta(batch.misfits, beta, cfg.tau);
    LevelRecord rec;
    rec.beta = bs.beta;
    rec.ess = bs.ess;

    precond->fit(x);
    if (move == LevelMove::kKalman) {
      const double alpha = 1.0 / (bs.beta - beta);
      RowMatrix z = precond->forward_all(x);
      z = eki_update(z, batch, model, alpha, ctx.rngs, static_cast<std::uint64_t>(level));
      x = precond->inverse_all(z);
      require_finite(x, "Kalman update");
      batch = evaluate_ensemble(model, x, ctx.counter, ctx.exec);
    } else {
      const Vector w = normalize_log_weights(importance_log_weights(batch.misfits, beta, bs.beta));
      Rng rng = ctx.rngs.stream(Stream::kResample, static_cast<std::uint64_t>(level));
      const std::vector<Index> anc = systematic_resample(w, rng);
      RowMatrix xr(n, x.cols());
      ForwardBatch br{RowMatrix(n, batch.outputs.cols()), Vector(n)};
      for (Index i = 0; i < n; ++i) {
        const Index a = anc[static_cast<std::size_t>(i)];
        xr.row(i) = x.row(a);
        br.outputs.row(i) = batch.outputs.row(a);
        br.misfits(i) = batch.misfits(a);
      }
      x = std::move(xr);
      batch = std::move(br);
    }
    beta = bs.beta;

    if (with_mcmc) sample_level(ctx, *precond, beta, level, x, batch, rho, rec);
    result.levels.push_back(std::move(rec));
    result.betas.push_back(beta);
    notify(cfg, level, beta, x);
  }

  result.final_ensemble = std::move(x);
  result.n_model_evals = ctx.counter.count;
  result.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

RunResult eks_run(const ModelSpec& model, const RunConfig& config) {
  model.validate();
  const RunConfig cfg = config.resolved(model.dim);
  const auto t0 = Clock::now();
  RunResult result = start_result(cfg);
  Context ctx{model, cfg, Executor(cfg.workers), RngFactory(cfg.seed), EvalCounter{}, result};

  const Index n = cfg.ensemble_size;
  const Index d = model.dim;
  const RowMatrix x0 = sample_prior(model, n, ctx.rngs);
  notify(cfg, 0, 0.0, x0);

  // The EKS update assumes a Gaussian prior, so it runs in the latent space
  // of an affine map fitted to prior draws, where the prior is taken as
  // N(0, I).
  std::unique_ptr<Preconditioner> precond = make_preconditioner(cfg.precond);
  precond->fit(x0);
  RowMatrix z = precond->forward_all(x0);
  const Vector prior_mean = Vector::Zero(d);
  const Matrix prior_cov = Matrix::Identity(d, d);

  LevelRecord rec;
  rec.beta = 1.0;
  rec.ess = static_cast<double>(n);
  bool unstable = false;
  for (int step = 1; step <= cfg.eks_steps; ++step) {
    const RowMatrix x = precond->inverse_all(z);
    require_finite(x, "EKS step " + std::to_string(step));
    const ForwardBatch batch = evaluate_ensemble(model, x, ctx.counter, ctx.exec);
    const double dt = eks_adaptive_dt(batch, model.data, model.noise);
    z = eks_step(z, batch, model, prior_mean, prior_cov, dt, ctx.rngs,
                 static_cast<std::uint64_t>(step));
    if (!z.allFinite())
      throw NumericalError("EKS became numerically unstable at step " + std::to_string(step));
    // The latent prior is N(0, I), so a posterior ensemble spread far beyond
    // it, or a vanishing step, signals the instability rather than inference.
    const double spread = ensemble_moments(z).cov.trace() / static_cast<double>(d);
    if (!unstable && (spread > kEksSpreadLimit || dt < kEksMinDt)) {
      unstable = true;
      ctx.warning("EKS unstable at step " + std::to_string(step) + ": latent spread " +
                  std::to_string(spread) + ", dt " + std::to_string(dt));
    }
  }
  rec.sweeps = 0;
  result.levels.push_back(rec);
  result.betas.push_back(1.0);
  result.final_ensemble = precond->inverse_all(z);
  require_finite(result.final_ensemble, "EKS");
  notify(cfg, 1, 1.0, result.final_ensemble);
  result.n_model_evals = ctx.counter.count;
  result.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace

RunResult run_skt(const ModelSpec& model, const RunConfig& config) {
  if (config.scheme != Scheme::kSkt && config.scheme != Scheme::kNfSkt)
    throw ConfigError("run_skt needs scheme SKT or NF-SKT");
  return annealed_run(model, config, LevelMove::kKalman, true);
}

RunResult run_smc(const ModelSpec& model, const RunConfig& config) {
  if (!is_smc(config.scheme)) throw ConfigError("run_smc needs scheme SMC or NF-SMC");
  return annealed_run(model, config, LevelMove::kResample, true);
}

RunResult run_kalman_only(const ModelSpec& model, const RunConfig& config) {
  switch (config.scheme) {
    case Scheme::kEki:
    case Scheme::kFaki:
      return annealed_run(model, config, LevelMove::kKalman, false);
    case Scheme::kEks:
      return eks_run(model, config);
    default:
      throw ConfigError("run_kalman_only needs scheme EKI, FAKI or EKS");
  }
}

RunResult run(const ModelSpec& model, const RunConfig& config) {
  switch (config.scheme) {
    case Scheme::kSkt:
    case Scheme::kNfSkt:
      return run_skt(model, config);
    case Scheme::kSmc:
    case Scheme::kNfSmc:
      return run_smc(model, config);
    default:
      return run_kalman_only(model, config);
  }
}

}  // namespace skt
