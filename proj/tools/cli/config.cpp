#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "skt/io.hpp"

namespace skt::cli {

namespace {

namespace pt = boost::property_tree;

struct Setting {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& where, const std::string& value, const char* want) {
  throw ConfigError(where + ": invalid value '" + value + "' (expected " + want + ")");
}

template <class T>
T parse_value(const std::string& v, const std::string& where) {
  if constexpr (std::is_same_v<T, bool>) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(where, v, "true|false");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return std::filesystem::path(v);
  } else {
    T out{};
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || ptr != end)
      bad_value(where, v, std::is_floating_point_v<T> ? "a number" : "an integer");
    return out;
  }
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return v.string();
  } else if constexpr (std::is_floating_point_v<T>) {
    return io::format_double(v);
  } else {
    return std::to_string(v);
  }
}

template <class Ref>
Setting field(std::string section, std::string key, Ref ref) {
  using T = std::remove_reference_t<std::invoke_result_t<Ref, ExperimentConfig&>>;
  const std::string where = "[" + section + "] " + key;
  return {std::move(section), std::move(key),
          [ref](const ExperimentConfig& c) {
            return format_value<T>(ref(const_cast<ExperimentConfig&>(c)));
          },
          [ref, where](ExperimentConfig& c, const std::string& v) {
            ref(c) = parse_value<T>(v, where);
          }};
}

template <class Ref, class Parse, class Format>
Setting choice(std::string section, std::string key, Ref ref, Parse parse, Format format) {
  return {std::move(section), std::move(key),
          [ref, format](const ExperimentConfig& c) {
            return format(ref(const_cast<ExperimentConfig&>(c)));
          },
          [ref, parse](ExperimentConfig& c, const std::string& v) { ref(c) = parse(v); }};
}

#define SKT_FIELD(section, key, expr) \
  field(section, key, [](ExperimentConfig& c) -> auto& { return expr; })

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = [] {
    std::vector<Setting> s;
    s.push_back(SKT_FIELD("model", "name", c.model.name));
    s.push_back(SKT_FIELD("model", "data_file", c.model.data_file));
    s.push_back(SKT_FIELD("model", "data_seed", c.model.data_seed));
    s.push_back(SKT_FIELD("model", "cache_dir", c.model.cache_dir));

    s.push_back(SKT_FIELD("model", "heat.plate_length", c.model.heat.plate_length));
    s.push_back(SKT_FIELD("model", "heat.grid", c.model.heat.grid));
    s.push_back(SKT_FIELD("model", "heat.steps", c.model.heat.steps));
    s.push_back(SKT_FIELD("model", "heat.t_final", c.model.heat.t_final));
    s.push_back(SKT_FIELD("model", "heat.obs_blocks", c.model.heat.obs_blocks));
    s.push_back(SKT_FIELD("model", "heat.noise_sigma", c.model.heat.noise_sigma));
    s.push_back(SKT_FIELD("model", "heat.length_scale", c.model.heat.length_scale));
    s.push_back(SKT_FIELD("model", "heat.order", c.model.heat.order));
    s.push_back(SKT_FIELD("model", "heat.truth_diffusivity", c.model.heat.truth_diffusivity));
    s.push_back(SKT_FIELD("model", "heat.truth_mean", c.model.heat.truth_mean));
    s.push_back(SKT_FIELD("model", "heat.truth_sigma", c.model.heat.truth_sigma));
    s.push_back(SKT_FIELD("model", "heat.truth_order", c.model.heat.truth_order));
    s.push_back(SKT_FIELD("model", "heat.prior_diffusivity_sigma",
                          c.model.heat.prior_diffusivity_sigma));
    s.push_back(SKT_FIELD("model", "heat.prior_mean_sigma", c.model.heat.prior_mean_sigma));
    s.push_back(SKT_FIELD("model", "heat.prior_field_sigma", c.model.heat.prior_field_sigma));

    s.push_back(SKT_FIELD("model", "gravity.quadrature", c.model.gravity.quadrature));
    s.push_back(SKT_FIELD("model", "gravity.surface", c.model.gravity.surface));
    s.push_back(SKT_FIELD("model", "gravity.depth", c.model.gravity.depth));
    s.push_back(SKT_FIELD("model", "gravity.noise_sigma", c.model.gravity.noise_sigma));
    s.push_back(SKT_FIELD("model", "gravity.length_scale", c.model.gravity.length_scale));
    s.push_back(SKT_FIELD("model", "gravity.order", c.model.gravity.order));
    s.push_back(SKT_FIELD("model", "gravity.kl_grid", c.model.gravity.kl_grid));
    s.push_back(SKT_FIELD("model", "gravity.prior_mean_sigma", c.model.gravity.prior_mean_sigma));
    s.push_back(SKT_FIELD("model", "gravity.prior_field_sigma", c.model.gravity.prior_field_sigma));

    auto k = [](const char* name) { return std::string("reaction_diffusion.") + name; };
    s.push_back(SKT_FIELD("model", k("nodes"), c.model.reaction_diffusion.nodes));
    s.push_back(SKT_FIELD("model", k("steps"), c.model.reaction_diffusion.steps));
    s.push_back(SKT_FIELD("model", k("t_final"), c.model.reaction_diffusion.t_final));
    s.push_back(SKT_FIELD("model", k("diffusion"), c.model.reaction_diffusion.diffusion));
    s.push_back(SKT_FIELD("model", k("reaction"), c.model.reaction_diffusion.reaction));
    s.push_back(SKT_FIELD("model", k("obs_x"), c.model.reaction_diffusion.obs_x));
    s.push_back(SKT_FIELD("model", k("obs_t"), c.model.reaction_diffusion.obs_t));
    s.push_back(SKT_FIELD("model", k("noise_sigma"), c.model.reaction_diffusion.noise_sigma));
    s.push_back(choice(
        "model", k("scheme"),
        [](ExperimentConfig& c) -> auto& { return c.model.reaction_diffusion.scheme; },
        [](const std::string& v) {
          if (v == "backward_euler") return models::TimeScheme::kBackwardEuler;
          if (v == "crank_nicolson") return models::TimeScheme::kCrankNicolson;
          bad_value("[model] reaction_diffusion.scheme", v, "backward_euler|crank_nicolson");
        },
        [](models::TimeScheme t) {
          return std::string(t == models::TimeScheme::kBackwardEuler ? "backward_euler"
                                                                     : "crank_nicolson");
        }));
    s.push_back(SKT_FIELD("model", k("newton_tol"), c.model.reaction_diffusion.newton_tol));
    s.push_back(SKT_FIELD("model", k("newton_max_iter"), c.model.reaction_diffusion.newton_max_iter));
    s.push_back(SKT_FIELD("model", k("half_width"), c.model.reaction_diffusion.half_width));
    s.push_back(SKT_FIELD("model", k("order"), c.model.reaction_diffusion.order));
    s.push_back(SKT_FIELD("model", k("truth_mean"), c.model.reaction_diffusion.truth_mean));
    s.push_back(SKT_FIELD("model", k("truth_alpha"), c.model.reaction_diffusion.truth_alpha));
    s.push_back(SKT_FIELD("model", k("truth_length_scale"),
                          c.model.reaction_diffusion.truth_length_scale));
    s.push_back(SKT_FIELD("model", k("truth_order"), c.model.reaction_diffusion.truth_order));
    s.push_back(SKT_FIELD("model", k("prior_mean_sigma"),
                          c.model.reaction_diffusion.prior_mean_sigma));
    s.push_back(SKT_FIELD("model", k("prior_alpha_sigma"),
                          c.model.reaction_diffusion.prior_alpha_sigma));
    s.push_back(SKT_FIELD("model", k("prior_length_shape"),
                          c.model.reaction_diffusion.prior_length_shape));
    s.push_back(SKT_FIELD("model", k("prior_length_scale"),
                          c.model.reaction_diffusion.prior_length_scale));

    s.push_back(SKT_FIELD("model", "linear_toy.dim", c.model.linear_toy.dim));
    s.push_back(SKT_FIELD("model", "linear_toy.obs_dim", c.model.linear_toy.obs_dim));
    s.push_back(SKT_FIELD("model", "linear_toy.noise_sigma", c.model.linear_toy.noise_sigma));
    s.push_back(SKT_FIELD("model", "linear_toy.instance_seed", c.model.linear_toy.instance_seed));
    s.push_back(SKT_FIELD("model", "nonlinear_toy.dim", c.model.nonlinear_toy.dim));
    s.push_back(SKT_FIELD("model", "nonlinear_toy.quadratic", c.model.nonlinear_toy.quadratic));
    s.push_back(SKT_FIELD("model", "nonlinear_toy.noise_sigma", c.model.nonlinear_toy.noise_sigma));
    s.push_back(SKT_FIELD("model", "nonlinear_toy.instance_seed",
                          c.model.nonlinear_toy.instance_seed));

    s.push_back(choice(
        "scheme", "name", [](ExperimentConfig& c) -> auto& { return c.run.scheme; },
        [](const std::string& v) { return parse_scheme(v); },
        [](Scheme x) { return scheme_name(x); }));
    s.push_back(SKT_FIELD("scheme", "precond", c.run.precond));
    s.push_back(SKT_FIELD("scheme", "ensemble_size", c.run.ensemble_size));
    s.push_back(SKT_FIELD("scheme", "eks_steps", c.run.eks_steps));
    s.push_back(SKT_FIELD("scheme", "seed", c.run.seed));
    s.push_back(SKT_FIELD("scheme", "workers", c.run.workers));

    s.push_back(choice(
        "kernel", "name", [](ExperimentConfig& c) -> auto& { return c.run.kernel; },
        [](const std::string& v) { return parse_kernel(v); },
        [](McmcKernel x) { return kernel_name(x); }));
    s.push_back(SKT_FIELD("kernel", "alpha_star", c.run.alpha_star));
    s.push_back(SKT_FIELD("kernel", "rho_init", c.run.rho_init));
    s.push_back(SKT_FIELD("kernel", "max_sweeps", c.run.max_sweeps));
    s.push_back(SKT_FIELD("kernel", "fixed_sweeps", c.run.fixed_sweeps));
    s.push_back(SKT_FIELD("kernel", "tau_corr", c.run.tau_corr));
    s.push_back(choice(
        "kernel", "corr_statistic",
        [](ExperimentConfig& c) -> auto& { return c.run.corr_statistic; },
        [](const std::string& v) {
          if (v == "x_plus_x2") return CorrStatistic::kXPlusXSquared;
          if (v == "x") return CorrStatistic::kX;
          bad_value("[kernel] corr_statistic", v, "x_plus_x2|x");
        },
        [](CorrStatistic x) {
          return std::string(x == CorrStatistic::kX ? "x" : "x_plus_x2");
        }));
    s.push_back(SKT_FIELD("kernel", "t_fit_max_iter", c.run.t_fit_max_iter));
    s.push_back(SKT_FIELD("kernel", "t_fit_tol", c.run.t_fit_tol));

    s.push_back(SKT_FIELD("annealing", "tau", c.run.tau));
    s.push_back(SKT_FIELD("annealing", "max_levels", c.run.max_levels));

    s.push_back(SKT_FIELD("output", "snapshot_levels", c.output.snapshot_levels));
    s.push_back(SKT_FIELD("output", "wall_clock", c.output.wall_clock));
    s.push_back(SKT_FIELD("output", "reconstruct_field", c.output.reconstruct_field));
    s.push_back(SKT_FIELD("output", "reference", c.output.reference));
    return s;
  }();
  return table;
}

#undef SKT_FIELD

const char* const kSections[] = {"model", "scheme", "kernel", "annealing", "output"};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  // The INI reader only knows ';' comments; accept '#' as well.
  std::string normalized;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line[first] = ';';
    normalized += line + '\n';
  }

  pt::ptree tree;
  std::istringstream in(normalized);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  std::map<std::string, const Setting*> index;
  for (const Setting& s : settings()) index[s.section + "/" + s.key] = &s;

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    bool known = false;
    for (const char* name : kSections) known = known || section == name;
    if (!known) {
      if (!body.data().empty()) throw ConfigError(origin + ": key '" + section + "' outside any section");
      throw ConfigError(origin + ": unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "/" + key);
      if (it == index.end())
        throw ConfigError(origin + ": unknown key '" + key + "' in section [" + section + "]");
      it->second->set(config, value.data());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path), path.string());
}

std::string render_config(const ExperimentConfig& config) {
  std::string out;
  for (const char* section : kSections) {
    out += std::string("[") + section + "]\n";
    for (const Setting& s : settings())
      if (s.section == section) out += s.key + " = " + s.get(config) + "\n";
    out += "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Setting& s : settings()) keys.push_back(s.section + "." + s.key);
  return keys;
}

}  // namespace skt::cli
