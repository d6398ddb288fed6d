#include "skt/models/benchmarks.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "skt/io.hpp"
#include "skt/models/kl_basis.hpp"
#include "skt/models/priors.hpp"

namespace skt::models {

namespace {

using Json = nlohmann::ordered_json;

Vector standard_normals(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

Vector add_noise(const Vector& signal, double sigma, std::uint64_t seed) {
  Rng rng = RngFactory(seed).stream(Stream::kDataNoise);
  return signal + sigma * standard_normals(signal.size(), rng);
}

KLBasis heat_basis(const ModelOptions& o, Index order) {
  const HeatSolver solver(o.heat);
  return cached_basis(o.cache_dir, KernelKind::kSquaredExponential, solver.unit_axis(),
                      o.heat.length_scale, order, true);
}

KLBasis gravity_basis(const ModelOptions& o) {
  const GravityConfig& g = o.gravity;
  if (g.kl_grid < 2 || g.kl_grid > g.quadrature)
    throw ConfigError("gravity: kl_grid must lie in [2, quadrature]");
  const Vector axis = GravitySolver::midpoints(g.kl_grid);
  KLBasis basis = cached_basis(o.cache_dir, KernelKind::kMatern32, axis, g.length_scale, g.order, false);
  if (g.kl_grid != g.quadrature) basis = interpolate_basis(basis, GravitySolver::midpoints(g.quadrature));
  return basis;
}

BenchmarkModel heat_model(const ModelOptions& o, const Vector& data) {
  const HeatConfig& c = o.heat;
  auto solver = std::make_shared<const HeatSolver>(c);
  auto basis = std::make_shared<const KLBasis>(heat_basis(o, c.order));
  auto prior = std::make_shared<ProductPrior>(std::vector<PriorComponent>{
      PriorComponent::half_normal_log("log_D", c.prior_diffusivity_sigma),
      PriorComponent::normal("mu_K", 0.0, c.prior_mean_sigma),
      PriorComponent::half_normal_log("log_sigma_K", c.prior_field_sigma),
      PriorComponent::std_normal_block("theta", c.order)});

  BenchmarkModel m;
  m.field = [basis, order = c.order](const Vector& x) -> Vector {
    return basis->field(x(1), std::exp(x(2)), x.segment(3, order));
  };
  auto field = m.field;
  m.spec.name = "heat";
  m.spec.dim = prior->dim();
  m.spec.obs_dim = c.obs_blocks * c.obs_blocks;
  m.spec.data = data;
  m.spec.noise = NoiseCovariance::isotropic(m.spec.obs_dim, c.noise_sigma);
  m.spec.prior = prior;
  m.spec.forward = [solver, field](const Vector& x) -> Vector {
    return solver->forward(field(x), std::exp(x(0)));
  };
  m.field_rows = c.grid;
  m.field_cols = c.grid;
  return m;
}

BenchmarkModel gravity_model(const ModelOptions& o, const Vector& data) {
  const GravityConfig& c = o.gravity;
  auto solver = std::make_shared<const GravitySolver>(c);
  const KLBasis basis = gravity_basis(o);
  auto prior = std::make_shared<ProductPrior>(std::vector<PriorComponent>{
      PriorComponent::normal("mu_K", 0.0, c.prior_mean_sigma),
      PriorComponent::half_normal_log("log_sigma_K", c.prior_field_sigma),
      PriorComponent::std_normal_block("theta", c.order)});

  // The forward map is linear in the field, so fold the kernel into the
  // basis once: ζ = μ_K G1 + σ_K (G Φ diag(sqrt λ)) θ.
  const Matrix& g = solver->kernel();
  auto column_sum = std::make_shared<const Vector>(g.rowwise().sum());
  auto projected = std::make_shared<const Matrix>(g * basis.eigenfunctions *
                                                  basis.eigenvalues.cwiseSqrt().asDiagonal());
  auto shared_basis = std::make_shared<const KLBasis>(basis);

  BenchmarkModel m;
  m.field = [shared_basis, order = c.order](const Vector& x) -> Vector {
    return shared_basis->field(x(0), std::exp(x(1)), x.segment(2, order));
  };
  m.spec.name = "gravity";
  m.spec.dim = prior->dim();
  m.spec.obs_dim = c.surface * c.surface;
  m.spec.data = data;
  m.spec.noise = NoiseCovariance::isotropic(m.spec.obs_dim, c.noise_sigma);
  m.spec.prior = prior;
  m.spec.forward = [column_sum, projected, order = c.order](const Vector& x) -> Vector {
    return x(0) * *column_sum + std::exp(x(1)) * (*projected * x.segment(2, order));
  };
  m.field_rows = c.quadrature;
  m.field_cols = c.quadrature;
  return m;
}

BenchmarkModel reaction_diffusion_model(const ModelOptions& o, const Vector& data) {
  const ReactionDiffusionConfig& c = o.reaction_diffusion;
  auto solver = std::make_shared<const ReactionDiffusionSolver>(c);
  auto basis = std::make_shared<const HilbertBasis>(c.half_width, c.order, solver->shifted_nodes());
  auto prior = std::make_shared<ProductPrior>(std::vector<PriorComponent>{
      PriorComponent::normal("mu_H", 0.0, c.prior_mean_sigma),
      PriorComponent::half_normal_log("log_alpha_H", c.prior_alpha_sigma),
      PriorComponent::inverse_gamma_log("log_ell_H", c.prior_length_shape, c.prior_length_scale),
      PriorComponent::std_normal_block("theta", c.order)});

  BenchmarkModel m;
  m.field = [basis, order = c.order](const Vector& x) -> Vector {
    return basis->field(x(0), std::exp(x(1)), std::exp(x(2)), x.segment(3, order));
  };
  auto field = m.field;
  m.spec.name = "reaction_diffusion";
  m.spec.dim = prior->dim();
  m.spec.obs_dim = c.obs_x * c.obs_t;
  m.spec.data = data;
  m.spec.noise = NoiseCovariance::isotropic(m.spec.obs_dim, c.noise_sigma);
  m.spec.prior = prior;
  m.spec.forward = [solver, field](const Vector& x) -> Vector { return solver->forward(field(x)); };
  m.field_rows = 1;
  m.field_cols = c.nodes;
  return m;
}

BenchmarkModel linear_toy_model(const ModelOptions& o, const Vector& data) {
  LinearGaussianToy base = make_linear_toy(o.linear_toy);
  LinearGaussianToy toy = linear_gaussian_toy(base.forward_matrix, base.prior_mean, base.prior_cov,
                                              base.spec.noise, data);
  BenchmarkModel m;
  m.spec = toy.spec;
  m.field = [](const Vector& x) -> Vector { return x; };
  m.field_cols = toy.spec.dim;
  m.exact_posterior = Moments{toy.posterior_mean, toy.posterior_cov};
  return m;
}

BenchmarkModel nonlinear_toy_model(const ModelOptions& o, const Vector& data) {
  NonlinearToy toy = make_nonlinear_toy(o.nonlinear_toy);
  BenchmarkModel m;
  m.spec = toy.spec;
  m.spec.data = data;
  m.field = [](const Vector& x) -> Vector { return x; };
  m.field_cols = toy.spec.dim;
  return m;
}

Index expected_obs(const ModelOptions& o) {
  if (o.name == "heat") return o.heat.obs_blocks * o.heat.obs_blocks;
  if (o.name == "gravity") return o.gravity.surface * o.gravity.surface;
  if (o.name == "reaction_diffusion") return o.reaction_diffusion.obs_x * o.reaction_diffusion.obs_t;
  if (o.name == "linear_toy") return o.linear_toy.obs_dim;
  if (o.name == "nonlinear_toy") return o.nonlinear_toy.dim;
  throw ConfigError("unknown model '" + o.name + "'");
}

}  // namespace

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"heat", "gravity", "reaction_diffusion",
                                                 "linear_toy", "nonlinear_toy"};
  return names;
}

SimulatedData simulate_data(const ModelOptions& o, std::uint64_t seed) {
  SimulatedData out;
  Rng truth_rng = RngFactory(seed).stream(Stream::kTruth);

  if (o.name == "heat") {
    const HeatConfig& c = o.heat;
    const HeatSolver solver(c);
    const KLBasis basis = heat_basis(o, c.truth_order);
    out.truth_coefficients = standard_normals(c.truth_order, truth_rng);
    out.truth_field = basis.field(c.truth_mean, c.truth_sigma, out.truth_coefficients);
    out.signal = solver.forward(out.truth_field, c.truth_diffusivity);
    out.y = add_noise(out.signal, c.noise_sigma, seed);
    out.truth_scalars = {{"D", c.truth_diffusivity},
                         {"mu_K", c.truth_mean},
                         {"sigma_K", c.truth_sigma},
                         {"length_scale", c.length_scale},
                         {"truth_order", static_cast<double>(c.truth_order)},
                         {"noise_sigma", c.noise_sigma}};
  } else if (o.name == "gravity") {
    const GravityConfig& c = o.gravity;
    const GravitySolver solver(c);
    out.truth_field = solver.truth_density();
    out.signal = solver.forward(out.truth_field);
    out.y = add_noise(out.signal, c.noise_sigma, seed);
    out.truth_coefficients = Vector(0);
    out.truth_scalars = {{"depth", c.depth},
                         {"quadrature", static_cast<double>(c.quadrature)},
                         {"density_max", out.truth_field.maxCoeff()},
                         {"noise_sigma", c.noise_sigma}};
  } else if (o.name == "reaction_diffusion") {
    const ReactionDiffusionConfig& c = o.reaction_diffusion;
    const ReactionDiffusionSolver solver(c);
    const HilbertBasis basis(c.half_width, c.truth_order, solver.shifted_nodes());
    out.truth_coefficients = standard_normals(c.truth_order, truth_rng);
    out.truth_field =
        basis.field(c.truth_mean, c.truth_alpha, c.truth_length_scale, out.truth_coefficients);
    out.signal = solver.forward(out.truth_field);
    out.y = add_noise(out.signal, c.noise_sigma, seed);
    out.truth_scalars = {{"mu_H", c.truth_mean},
                         {"alpha_H", c.truth_alpha},
                         {"ell_H", c.truth_length_scale},
                         {"truth_order", static_cast<double>(c.truth_order)},
                         {"noise_sigma", c.noise_sigma}};
  } else if (o.name == "linear_toy") {
    // The toy instance fixes its own truth; seed only redraws the noise.
    const LinearToyConfig& c = o.linear_toy;
    LinearGaussianToy base = make_linear_toy(c);
    out.truth_coefficients = base.truth;
    out.truth_field = base.truth;
    out.signal = base.forward_matrix * out.truth_coefficients;
    out.y = seed == 0 ? base.spec.data : add_noise(out.signal, c.noise_sigma, seed);
    out.truth_scalars = {{"noise_sigma", c.noise_sigma}};
  } else if (o.name == "nonlinear_toy") {
    const NonlinearToyConfig& c = o.nonlinear_toy;
    NonlinearToy toy = make_nonlinear_toy(c);
    out.truth_coefficients = toy.truth;
    out.truth_field = toy.truth;
    out.signal = toy.spec.forward(toy.truth);
    out.y = seed == 0 ? toy.spec.data : add_noise(out.signal, c.noise_sigma, seed);
    out.truth_scalars = {{"noise_sigma", c.noise_sigma}, {"quadratic", c.quadratic}};
  } else {
    throw ConfigError("unknown model '" + o.name + "'");
  }
  return out;
}

BenchmarkModel make_model(const ModelOptions& o, const Vector& data) {
  if (data.size() != expected_obs(o))
    throw ConfigError("model '" + o.name + "' expects " + std::to_string(expected_obs(o)) +
                      " observations, data has " + std::to_string(data.size()));
  BenchmarkModel m;
  if (o.name == "heat")
    m = heat_model(o, data);
  else if (o.name == "gravity")
    m = gravity_model(o, data);
  else if (o.name == "reaction_diffusion")
    m = reaction_diffusion_model(o, data);
  else if (o.name == "linear_toy")
    m = linear_toy_model(o, data);
  else
    m = nonlinear_toy_model(o, data);
  m.spec.validate();
  return m;
}

BenchmarkModel make_model(const ModelOptions& o) {
  const Vector y = o.data_file.empty() ? simulate_data(o, o.data_seed).y : io::read_vector(o.data_file);
  return make_model(o, y);
}

std::vector<std::filesystem::path> write_simulation(const std::filesystem::path& outdir,
                                                    const ModelOptions& o,
                                                    const SimulatedData& data) {
  std::filesystem::create_directories(outdir);
  const auto y_path = outdir / "y.csv";
  const auto signal_path = outdir / "signal.csv";
  const auto truth_path = outdir / "truth.json";
  io::write_vector(y_path, data.y);
  io::write_vector(signal_path, data.signal);

  Json truth;
  truth["model"] = o.name;
  Json scalars = Json::object();
  for (const auto& [k, v] : data.truth_scalars) scalars[k] = v;
  truth["parameters"] = scalars;
  truth["coefficients"] = std::vector<double>(data.truth_coefficients.data(),
                                              data.truth_coefficients.data() + data.truth_coefficients.size());
  truth["field"] = std::vector<double>(data.truth_field.data(),
                                       data.truth_field.data() + data.truth_field.size());
  truth["obs_dim"] = data.y.size();
  io::write_text(truth_path, truth.dump(2) + "\n");
  return {y_path, signal_path, truth_path};
}

}  // namespace skt::models
