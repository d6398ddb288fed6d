#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "skt/io.hpp"

namespace skt::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitFailure;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto parse = [&text](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("invalid seed range '" + text + "' (expected A..B)");
    return v;
  };
  const std::string_view view(text);
  const auto dots = view.find("..");
  if (dots == std::string_view::npos) return {parse(view)};
  const std::uint64_t a = parse(view.substr(0, dots));
  const std::uint64_t b = parse(view.substr(dots + 2));
  if (b < a) throw ConfigError("seed range '" + text + "' is empty");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

std::string metrics_json(const RunResult& r, const std::string& model_name, std::uint64_t seed,
                         bool wall_clock, const std::optional<BiasReport>& bias) {
  json j;
  j["scheme"] = r.scheme;
  j["kernel"] = r.kernel;
  j["precond"] = r.precond;
  j["J"] = r.ensemble_size;
  j["tau"] = r.tau;
  j["tau_corr"] = r.tau_corr;
  j["n_levels"] = r.n_levels();
  j["betas"] = r.betas;
  j["n_model_evals"] = r.n_model_evals;
  j["n_model_evals_per_particle"] = r.evals_per_particle();
  json acceptance = json::array();
  json sweeps = json::array();
  json ess = json::array();
  json nu = json::array();
  json rho = json::array();
  json hit_cap = json::array();
  for (const LevelRecord& l : r.levels) {
    acceptance.push_back(l.acceptance);
    sweeps.push_back(l.sweeps);
    ess.push_back(l.ess);
    nu.push_back(l.nu);
    rho.push_back(l.rho);
    hit_cap.push_back(l.hit_cap);
  }
  j["acceptance"] = acceptance;
  j["sweeps_per_level"] = sweeps;
  j["wall_time_s"] = wall_clock ? r.wall_time_s : 0.0;
  j["model"] = model_name;
  j["seed"] = seed;
  j["ess_per_level"] = ess;
  j["nu_per_level"] = nu;
  j["rho_per_level"] = rho;
  j["hit_cap_per_level"] = hit_cap;
  j["total_sweeps"] = r.total_sweeps();
  j["warnings"] = r.warnings;
  if (bias) {
    j["b1_sq"] = bias->b1_sq;
    j["b2_sq"] = bias->b2_sq;
  }
  return j.dump(2) + "\n";
}

std::optional<ReferenceMoments> resolve_reference(const ExperimentConfig& config,
                                                  const models::BenchmarkModel& model) {
  if (!config.output.reference.empty()) {
    ReferenceMoments ref = read_reference_moments(config.output.reference);
    if (ref.dim() != model.spec.dim)
      throw ConfigError("reference '" + config.output.reference.string() + "' has dimension " +
                        std::to_string(ref.dim()) + ", model has " +
                        std::to_string(model.spec.dim));
    return ref;
  }
  if (model.exact_posterior)
    return gaussian_reference(model.exact_posterior->mean, model.exact_posterior->cov.diagonal());
  return std::nullopt;
}

void write_manifest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    if (rel == "manifest.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const fs::path& rel : files) {
    json e;
    e["path"] = rel.generic_string();
    e["bytes"] = fs::file_size(dir / rel);
    e["sha256"] = io::sha256_file(dir / rel);
    list.push_back(e);
  }
  json j;
  j["files"] = list;
  io::write_text(dir / "manifest.json", j.dump(2) + "\n");
}

namespace {

std::string level_name(int level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "level_%03d.csv", level);
  return buf;
}

}  // namespace

SeedOutcome run_seed(const ExperimentConfig& config, const models::BenchmarkModel& model,
                     std::uint64_t seed, const fs::path& dir,
                     const std::optional<ReferenceMoments>& reference) {
  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.dir = dir;
  try {
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    ExperimentConfig resolved = config;
    resolved.run.seed = seed;
    io::write_text(dir / "resolved_config.ini", render_config(resolved));

    RunConfig run = resolved.run;
    if (config.output.snapshot_levels) {
      const fs::path snapdir = dir / "snapshots";
      run.on_level = [snapdir](int level, double, const RowMatrix& states) {
        io::write_ensemble_csv(snapdir / level_name(level), states);
      };
    }
    RunResult result = skt::run(model.spec, run);
    if (!config.output.wall_clock) result.wall_time_s = 0.0;

    io::write_ensemble_csv(dir / "final_ensemble.csv", result.final_ensemble);
    if (reference) {
      outcome.bias = squared_bias(result.final_ensemble, *reference);
      io::write_text(dir / "bias_report.json", bias_report_json(*outcome.bias));
    }
    if (config.output.reconstruct_field)
      io::write_matrix_csv(dir / "field_mean.csv", reconstruct_field(result.final_ensemble, model));
    io::write_text(dir / "metrics.json",
                   metrics_json(result, model.spec.name, seed, config.output.wall_clock, outcome.bias));
    write_manifest(dir);
    outcome.result = std::move(result);
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code_for(e);
    outcome.error = e.what();
  }
  return outcome;
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string summary_csv(const std::vector<SeedOutcome>& outcomes) {
  const std::vector<std::string> metrics = {"n_levels",    "n_model_evals_per_particle",
                                            "total_sweeps", "b1_sq",
                                            "b2_sq",       "wall_time_s"};
  auto values = [](const SeedOutcome& o) -> std::vector<std::optional<double>> {
    const RunResult& r = *o.result;
    std::optional<double> b1, b2;
    if (o.bias) {
      b1 = o.bias->b1_sq;
      b2 = o.bias->b2_sq;
    }
    return {static_cast<double>(r.n_levels()), r.evals_per_particle(),
            static_cast<double>(r.total_sweeps()), b1, b2, r.wall_time_s};
  };

  std::string out = "seed,status";
  for (const auto& m : metrics) out += "," + m + "," + m + "_std";
  out += ",error\n";

  std::vector<std::vector<double>> columns(metrics.size());
  std::size_t n_ok = 0;
  for (const SeedOutcome& o : outcomes) {
    out += std::to_string(o.seed) + "," + (o.ok() ? "ok" : "failed");
    if (o.ok()) {
      ++n_ok;
      const auto v = values(o);
      for (std::size_t k = 0; k < v.size(); ++k) {
        out += "," + (v[k] ? io::format_double(*v[k]) : std::string()) + ",";
        if (v[k]) columns[k].push_back(*v[k]);
      }
      out += ",\n";
    } else {
      for (std::size_t k = 0; k < metrics.size(); ++k) out += ",,";
      out += "," + csv_quote(o.error) + "\n";
    }
  }

  out += "aggregate," + std::to_string(n_ok) + "/" + std::to_string(outcomes.size()) + "_ok";
  for (const auto& col : columns) {
    if (col.empty()) {
      out += ",,";
      continue;
    }
    const double n = static_cast<double>(col.size());
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = col.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out += "," + io::format_double(mean) + "," + io::format_double(sd);
  }
  out += ",\n";
  return out;
}

int cmd_simulate(const ExperimentConfig& config, std::optional<std::uint64_t> seed,
                 const fs::path& outdir, std::ostream& out) {
  ExperimentConfig resolved = config;
  if (seed) resolved.model.data_seed = *seed;
  if (resolved.model.cache_dir.empty()) resolved.model.cache_dir = outdir / "basis_cache";
  resolved.model.data_file.clear();

  const models::SimulatedData data = models::simulate_data(resolved.model, resolved.model.data_seed);
  // Building the inference model fills the basis cache.
  const models::BenchmarkModel model = models::make_model(resolved.model, data.y);
  const auto written = models::write_simulation(outdir, resolved.model, data);
  io::write_text(outdir / "resolved_config.ini", render_config(resolved));
  write_manifest(outdir);
  for (const auto& p : written) out << "wrote " << p.string() << "\n";
  out << model.spec.name << ": " << data.y.size() << " observations, " << model.spec.dim
      << " parameters\n";
  return kExitOk;
}

int cmd_run(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
            const fs::path& outdir, std::ostream& out) {
  const models::BenchmarkModel model = models::make_model(config.model);
  const std::optional<ReferenceMoments> reference = resolve_reference(config, model);
  io::write_text(outdir / "resolved_config.ini", render_config(config));

  std::vector<SeedOutcome> outcomes;
  int code = kExitOk;
  for (std::uint64_t seed : seeds) {
    const fs::path dir = outdir / ("seed_" + std::to_string(seed));
    SeedOutcome o = run_seed(config, model, seed, dir, reference);
    if (o.ok()) {
      const RunResult& r = *o.result;
      out << "seed " << seed << ": " << r.scheme << "/" << r.kernel << " N_beta=" << r.n_levels()
          << " evals/J=" << io::format_double(r.evals_per_particle());
      if (o.bias)
        out << " b1_sq=" << io::format_double(o.bias->b1_sq)
            << " b2_sq=" << io::format_double(o.bias->b2_sq);
      out << "\n";
    } else {
      out << "seed " << seed << ": FAILED (" << o.error << ")\n";
      if (code == kExitOk) code = o.exit_code;
    }
    outcomes.push_back(std::move(o));
  }
  io::write_text(outdir / "summary.csv", summary_csv(outcomes));
  return code;
}

int cmd_bias(const fs::path& ensemble, const fs::path& reference, const fs::path& report_path,
             std::ostream& out) {
  const RowMatrix states = io::read_ensemble_csv(ensemble);
  const ReferenceMoments ref = read_reference_moments(reference);
  const BiasReport report = squared_bias(states, ref);
  io::write_text(report_path, bias_report_json(report));
  out << "b1_sq=" << io::format_double(report.b1_sq) << " b2_sq=" << io::format_double(report.b2_sq)
      << " threshold=" << io::format_double(kLowBiasThreshold) << " "
      << (report.low_bias() ? "PASS" : "FAIL") << "\n";
  return kExitOk;
}

}  // namespace skt::cli
