#include <filesystem>
#include <sstream>

#include "cli/commands.hpp"
#include "doctest.h"
#include "json.hpp"
#include "skt/io.hpp"

using namespace skt;
using namespace skt::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("skt_cli_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_linear() {
  return parse_config(
      "[model]\nname = linear_toy\n"
      "[scheme]\nname = SKT\nensemble_size = 40\n"
      "[kernel]\nmax_sweeps = 3\n"
      "[output]\nwall_clock = false\n");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(
        "# comment\n[model]\nname = heat\nheat.grid = 32\nheat.obs_blocks = 4\n"
        "[scheme]\nname = NF-SMC\nensemble_size = 100\nseed = 9\n"
        "[kernel]\nname = pCN\ntau_corr = 0.2\nfixed_sweeps = true\ncorr_statistic = x\n"
        "[annealing]\ntau = 0.7\n");
    CHECK(c.model.name == "heat");
    CHECK(c.model.heat.grid == 32);
    CHECK(c.run.scheme == Scheme::kNfSmc);
    CHECK(c.run.kernel == McmcKernel::kPcn);
    CHECK(c.run.ensemble_size == 100);
    CHECK(c.run.seed == 9);
    CHECK(c.run.tau == 0.7);
    CHECK(c.run.tau_corr == 0.2);
    CHECK(c.run.fixed_sweeps);
    CHECK(c.run.corr_statistic == CorrStatistic::kX);
  }

  TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(parse_config("[model]\nnmae = heat\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[modle]\nname = heat\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[scheme]\nname = HMC\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[scheme]\nensemble_size = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stray = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/skt.ini"), Error);
  }

  TEST_CASE("rendered config parses back to the same rendering") {
    ExperimentConfig c = small_linear();
    c.model.gravity.depth = 0.125;
    c.run.tau = 0.3;
    const std::string text = render_config(c);
    CHECK(render_config(parse_config(text)) == text);
    for (const auto& key : config_keys()) {
      const auto dot = key.find('.');
      CHECK(text.find(key.substr(dot + 1) + " =") != std::string::npos);
    }
  }

  TEST_CASE("seed ranges") {
    CHECK(parse_seed_range("3..5") == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
    CHECK_THROWS_AS(parse_seed_range("5..3"), ConfigError);
    CHECK_THROWS_AS(parse_seed_range("a..3"), ConfigError);
    CHECK_THROWS_AS(parse_seed_range("1..."), ConfigError);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
    CHECK(exit_code_for(NumericalError("x")) == kExitNumerical);
    CHECK(exit_code_for(ModelDomainError("x")) == kExitNumerical);
    CHECK(exit_code_for(IoError("x")) == kExitIo);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitFailure);
  }

  TEST_CASE("run writes per-seed outputs and a summary row per seed") {
    const fs::path out = scratch("run");
    std::ostringstream log;
    CHECK(cmd_run(small_linear(), {1, 2, 3}, out, log) == kExitOk);
    for (int s = 1; s <= 3; ++s) {
      const fs::path d = out / ("seed_" + std::to_string(s));
      CHECK(fs::exists(d / "final_ensemble.csv"));
      CHECK(fs::exists(d / "metrics.json"));
      CHECK(fs::exists(d / "bias_report.json"));
      CHECK(fs::exists(d / "manifest.json"));
      const auto m = nlohmann::json::parse(io::read_text(d / "metrics.json"));
      CHECK(m["seed"] == s);
      CHECK(m["wall_time_s"] == 0.0);
      CHECK(m["n_model_evals"].get<double>() / 40.0 == m["n_model_evals_per_particle"].get<double>());
    }
    std::istringstream summary(io::read_text(out / "summary.csv"));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(summary, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines.back().rfind("aggregate,3/3_ok", 0) == 0);
    fs::remove_all(out);
  }

  TEST_CASE("manifest hashes match the files") {
    const fs::path out = scratch("manifest");
    std::ostringstream log;
    cmd_run(small_linear(), {4}, out, log);
    const fs::path d = out / "seed_4";
    const auto m = nlohmann::json::parse(io::read_text(d / "manifest.json"));
    REQUIRE(!m["files"].empty());
    for (const auto& f : m["files"])
      CHECK(f["sha256"].get<std::string>() == io::sha256_file(d / f["path"].get<std::string>()));
    fs::remove_all(out);
  }

  TEST_CASE("a failing seed is reported without aborting the others") {
    ExperimentConfig c = small_linear();
    c.run.max_levels = 1;
    c.model.linear_toy.noise_sigma = 0.01;
    const fs::path out = scratch("fail");
    std::ostringstream log;
    CHECK(cmd_run(c, {1, 2}, out, log) == kExitNumerical);
    const std::string summary = io::read_text(out / "summary.csv");
    CHECK(summary.find("aggregate,0/2_ok") != std::string::npos);
    CHECK(summary.find("failed") != std::string::npos);
    fs::remove_all(out);
  }

  TEST_CASE("bias command") {
    const fs::path out = scratch("bias");
    RowMatrix x(2, 1);
    x << -1.0, 1.0;
    io::write_ensemble_csv(out / "e.csv", x);
    write_reference_moments(out / "ref.csv", gaussian_reference(Vector::Zero(1), Vector::Ones(1)));
    std::ostringstream log;
    CHECK(cmd_bias(out / "e.csv", out / "ref.csv", out / "report.json", log) == kExitOk);
    CHECK(log.str().find("PASS") != std::string::npos);
    CHECK(fs::exists(out / "report.json"));
    write_reference_moments(out / "ref3.csv", gaussian_reference(Vector::Zero(3), Vector::Ones(3)));
    CHECK_THROWS_AS(cmd_bias(out / "e.csv", out / "ref3.csv", out / "r.json", log), ConfigError);
    fs::remove_all(out);
  }

  TEST_CASE("simulate writes the data files") {
    ExperimentConfig c;
    c.model.name = "nonlinear_toy";
    const fs::path out = scratch("sim");
    std::ostringstream log;
    CHECK(cmd_simulate(c, 3, out, log) == kExitOk);
    CHECK(io::read_vector(out / "y.csv").size() == 10);
    CHECK(fs::exists(out / "truth.json"));
    CHECK(fs::exists(out / "manifest.json"));
    fs::remove_all(out);
  }
}
