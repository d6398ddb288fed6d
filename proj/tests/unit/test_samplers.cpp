#include <set>

#include "doctest.h"
#include "skt/diagnostics.hpp"
#include "skt/models/benchmarks.hpp"
#include "skt/samplers.hpp"
#include "support.hpp"

using namespace skt;

namespace {

models::BenchmarkModel linear_toy() {
  models::ModelOptions o;
  o.name = "linear_toy";
  return models::make_model(o);
}

models::BenchmarkModel nonlinear_toy() {
  models::ModelOptions o;
  o.name = "nonlinear_toy";
  return models::make_model(o);
}

RunConfig config(Scheme s, Index j, std::uint64_t seed) {
  RunConfig c;
  c.scheme = s;
  c.ensemble_size = j;
  c.seed = seed;
  return c;
}

int total_sweeps(const RunResult& r) {
  int s = 0;
  for (const auto& l : r.levels) s += l.sweeps;
  return s;
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("configuration validation") {
    RunConfig c;
    c.ensemble_size = 1;
    CHECK_THROWS_AS(c.resolved(3), ConfigError);
    c = RunConfig{};
    c.tau = 1.0;
    CHECK_THROWS_AS(c.resolved(3), ConfigError);
    c = RunConfig{};
    c.scheme = Scheme::kNfSkt;
    c.precond = "identity";
    CHECK_THROWS_AS(c.resolved(3), ConfigError);
    c = RunConfig{};
    const RunConfig r = c.resolved(7);
    CHECK(r.ensemble_size == 70);
    CHECK(r.precond == "identity");
    CHECK(r.effective_max_sweeps() == 50);
    c.scheme = Scheme::kSmc;
    CHECK(c.resolved(7).effective_max_sweeps() == 51);
    c.scheme = Scheme::kFaki;
    CHECK(c.resolved(7).precond == "affine");
    CHECK(parse_scheme("NF-SKT") == Scheme::kNfSkt);
    CHECK(scheme_name(Scheme::kEks) == "EKS");
    CHECK_THROWS_AS(parse_scheme("HMC"), ConfigError);
    CHECK(parse_kernel("pCN") == McmcKernel::kPcn);
  }

  TEST_CASE("forward evaluation audit") {
    const auto m = linear_toy();
    const Index j = 40;
    for (Scheme s : {Scheme::kSkt, Scheme::kNfSkt, Scheme::kEki, Scheme::kFaki}) {
      RunConfig c = config(s, j, 3);
      c.max_sweeps = 4;
      const RunResult r = run(m.spec, c);
      const auto expected = static_cast<std::uint64_t>(j + j * r.n_levels() + j * total_sweeps(r));
      CHECK(r.n_model_evals == expected);
    }
    for (Scheme s : {Scheme::kSmc, Scheme::kNfSmc}) {
      RunConfig c = config(s, j, 3);
      c.max_sweeps = 4;
      const RunResult r = run(m.spec, c);
      CHECK(r.n_model_evals == static_cast<std::uint64_t>(j + j * total_sweeps(r)));
    }
    RunConfig c = config(Scheme::kEks, j, 3);
    c.eks_steps = 7;
    CHECK(run(m.spec, c).n_model_evals == static_cast<std::uint64_t>(7 * j));
  }

  TEST_CASE("fixed sweeps run exactly the cap") {
    RunConfig c = config(Scheme::kSkt, 30, 4);
    c.max_sweeps = 3;
    c.fixed_sweeps = true;
    const RunResult r = run(linear_toy().spec, c);
    for (const auto& l : r.levels) {
      CHECK(l.sweeps == 3);
      CHECK(l.acceptance.size() == 3);
      CHECK(l.rho.size() == 3);
    }
  }

  TEST_CASE("inverse temperatures increase strictly and end at one") {
    for (Scheme s : {Scheme::kSkt, Scheme::kSmc, Scheme::kEki}) {
      const RunResult r = run(nonlinear_toy().spec, config(s, 100, 5));
      REQUIRE(!r.betas.empty());
      CHECK(r.betas.back() == 1.0);
      CHECK(r.betas.front() > 0.0);
      for (std::size_t k = 1; k < r.betas.size(); ++k) CHECK(r.betas[k] > r.betas[k - 1]);
      CHECK(r.levels.size() == r.betas.size());
    }
  }

  TEST_CASE("realised ESS sits at the target until the last level") {
    const RunResult r = run(nonlinear_toy().spec, config(Scheme::kSkt, 100, 6));
    for (std::size_t k = 0; k + 1 < r.levels.size(); ++k)
      CHECK(std::abs(r.levels[k].ess - 50.0) <= 1e-6 * 100.0);
    CHECK(r.levels.back().ess >= 50.0 - 1e-6 * 100.0);
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto m = nonlinear_toy();
    for (Scheme s : {Scheme::kNfSkt, Scheme::kSmc, Scheme::kEks}) {
      RunConfig c = config(s, 60, 7);
      c.eks_steps = 20;
      c.workers = 1;
      const RunResult a = run(m.spec, c);
      c.workers = 3;
      const RunResult b = run(m.spec, c);
      CHECK(a.final_ensemble == b.final_ensemble);
      CHECK(a.betas == b.betas);
      CHECK(a.n_model_evals == b.n_model_evals);
    }
  }

  TEST_CASE("SMC and SKT need a similar number of levels") {
    const auto m = nonlinear_toy();
    const RunResult a = run(m.spec, config(Scheme::kSkt, 100, 8));
    const RunResult b = run(m.spec, config(Scheme::kSmc, 100, 8));
    CHECK(std::abs(a.n_levels() - b.n_levels()) <= 2);
  }

  TEST_CASE("small temperature steps keep most ancestors") {
    // One SMC resampling step at τ = 0.99 on prior draws of the nonlinear toy.
    const auto m = nonlinear_toy();
    const RngFactory rngs(9);
    const RowMatrix x = sample_prior(m.spec, 200, rngs);
    EvalCounter counter;
    const ForwardBatch b = evaluate_ensemble(m.spec, x, counter);
    const BetaSolve s = solve_next_beta(b.misfits, 0.0, 0.99);
    const Vector w = normalize_log_weights(importance_log_weights(b.misfits, 0.0, s.beta));
    Rng rng = rngs.stream(Stream::kResample, 1);
    const auto anc = systematic_resample(w, rng);
    const std::set<Index> unique(anc.begin(), anc.end());
    CHECK(static_cast<double>(unique.size()) >= 0.9 * 200);
  }

  TEST_CASE("EKI on the linear toy recovers the posterior") {
    const auto m = linear_toy();
    const RunResult r = run(m.spec, config(Scheme::kEki, 5000, 10));
    const Moments& post = *m.exact_posterior;
    const Moments got = ensemble_moments(r.final_ensemble);
    for (Index k = 0; k < m.spec.dim; ++k) {
      CHECK(std::abs(got.mean(k) - post.mean(k)) < 4.0 * std::sqrt(post.cov(k, k) / 5000.0));
      CHECK(got.cov(k, k) == doctest::Approx(post.cov(k, k)).epsilon(0.1));
    }
  }

  TEST_CASE("EKS mean on the linear toy") {
    const auto m = linear_toy();
    RunConfig c = config(Scheme::kEks, 100 * m.spec.dim, 11);
    const RunResult r = run(m.spec, c);
    const Moments got = ensemble_moments(r.final_ensemble);
    const Moments& post = *m.exact_posterior;
    for (Index k = 0; k < m.spec.dim; ++k)
      CHECK(std::abs(got.mean(k) - post.mean(k)) <= 0.1 * std::sqrt(post.cov(k, k)) + 0.1 * std::abs(post.mean(k)));
  }

  TEST_CASE("on a nonlinear target EKI is more biased than SKT") {
    const auto m = nonlinear_toy();
    const ReferenceMoments rm = read_reference_moments(SKT_TEST_DATA_DIR "/nonlinear_toy_reference.csv");
    const RunResult skt = run(m.spec, config(Scheme::kSkt, 400, 13));
    const RunResult eki = run(m.spec, config(Scheme::kEki, 400, 13));
    CHECK(squared_bias(eki.final_ensemble, rm).b2_sq > squared_bias(skt.final_ensemble, rm).b2_sq);
  }

  TEST_CASE("EKS at heat scale with J = 10d is flagged") {
    models::ModelOptions o;
    o.name = "heat";
    o.heat.grid = 16;
    o.heat.obs_blocks = 8;
    o.heat.steps = 60;
    o.heat.order = 20;
    o.heat.truth_order = 30;
    const auto m = models::make_model(o);
    RunConfig c = config(Scheme::kEks, 10 * m.spec.dim, 14);
    bool flagged = false;
    try {
      const RunResult r = run(m.spec, c);
      flagged = !r.warnings.empty();
    } catch (const NumericalError&) {
      flagged = true;
    }
    CHECK(flagged);
  }

  TEST_CASE("pCN kernel records no degrees of freedom") {
    RunConfig c = config(Scheme::kSkt, 50, 15);
    c.kernel = McmcKernel::kPcn;
    c.max_sweeps = 2;
    const RunResult r = run(linear_toy().spec, c);
    CHECK(r.kernel == "pCN");
    for (const auto& l : r.levels) CHECK(l.nu == 0.0);
  }
}
