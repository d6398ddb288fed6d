#include "skt/models/heat.hpp"

#include <cmath>
#include <string>

#include "skt/io.hpp"

namespace skt::models {

HeatSolver::HeatSolver(const HeatConfig& cfg) : cfg_(cfg) {
  if (cfg.grid < 3 || cfg.steps < 1 || !(cfg.plate_length > 0.0) || !(cfg.t_final > 0.0))
    throw ConfigError("heat: invalid grid, step count, plate length or final time");
  if (cfg.obs_blocks < 1 || cfg.grid % cfg.obs_blocks != 0)
    throw ConfigError("heat: grid must divide evenly into observation blocks");
  dx_ = cfg.plate_length / static_cast<double>(cfg.grid - 1);
  dt_ = cfg.t_final / static_cast<double>(cfg.steps);
}

double HeatSolver::max_stable_diffusivity() const { return 0.25 * dx_ * dx_ / dt_; }

Vector HeatSolver::unit_axis() const {
  return Vector::LinSpaced(cfg_.grid, 0.0, 1.0);
}

Vector HeatSolver::evolve(const Vector& initial, double diffusivity) const {
  const Index n = cfg_.grid;
  if (initial.size() != n * n) throw ConfigError("heat: initial field has wrong size");
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity))
    throw ModelDomainError("heat: diffusivity must be positive, got " + io::format_double(diffusivity));
  if (diffusivity > max_stable_diffusivity())
    throw ModelDomainError("heat: FTCS unstable for D = " + io::format_double(diffusivity) +
                           " (limit " + io::format_double(max_stable_diffusivity()) + ")");

  const double r = diffusivity * dt_ / (dx_ * dx_);
  Vector u = initial;
  for (Index i = 0; i < n; ++i) {
    u(i) = 0.0;
    u((n - 1) * n + i) = 0.0;
    u(i * n) = 0.0;
    u(i * n + n - 1) = 0.0;
  }
  Vector next = u;
  for (Index step = 0; step < cfg_.steps; ++step) {
    for (Index i = 1; i < n - 1; ++i) {
      const double* up = u.data() + (i - 1) * n;
      const double* mid = u.data() + i * n;
      const double* dn = u.data() + (i + 1) * n;
      double* out = next.data() + i * n;
      for (Index j = 1; j < n - 1; ++j)
        out[j] = mid[j] + r * (up[j] + dn[j] + mid[j - 1] + mid[j + 1] - 4.0 * mid[j]);
    }
    u.swap(next);
  }
  return u;
}

Vector HeatSolver::observe(const Vector& field) const {
  const Index n = cfg_.grid;
  const Index b = cfg_.obs_blocks;
  const Index w = n / b;
  Vector obs(b * b);
  for (Index bi = 0; bi < b; ++bi) {
    for (Index bj = 0; bj < b; ++bj) {
      double s = 0.0;
      for (Index i = 0; i < w; ++i)
        for (Index j = 0; j < w; ++j) s += field((bi * w + i) * n + bj * w + j);
      obs(bi * b + bj) = s / static_cast<double>(w * w);
    }
  }
  return obs;
}

}  // namespace skt::models
