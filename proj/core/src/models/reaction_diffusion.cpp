#include "skt/models/reaction_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace skt::models {

namespace {

// Thomas algorithm for a tridiagonal system with constant off-diagonal c.
void solve_tridiagonal(std::vector<double>& diag, double off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off / diag[i - 1];
    diag[i] -= m * off;
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

}  // namespace

ReactionDiffusionSolver::ReactionDiffusionSolver(const ReactionDiffusionConfig& cfg) : cfg_(cfg) {
  if (cfg.nodes < 3 || cfg.steps < 1 || !(cfg.t_final > 0.0) || !(cfg.diffusion > 0.0))
    throw ConfigError("reaction-diffusion: invalid grid, steps, final time or diffusion");
  if (cfg.obs_x < 1 || cfg.nodes % cfg.obs_x != 0)
    throw ConfigError("reaction-diffusion: node count must be a multiple of obs_x");
  if (cfg.obs_t < 1 || cfg.steps % cfg.obs_t != 0)
    throw ConfigError("reaction-diffusion: step count must be a multiple of obs_t");
}

Vector ReactionDiffusionSolver::nodes() const { return Vector::LinSpaced(cfg_.nodes, 0.0, 1.0); }

Vector ReactionDiffusionSolver::shifted_nodes() const { return nodes().array() - 0.5; }

std::vector<Index> ReactionDiffusionSolver::observed_nodes() const {
  const Index stride = cfg_.nodes / cfg_.obs_x;
  std::vector<Index> idx;
  for (Index p = 0; p < cfg_.obs_x; ++p) idx.push_back(stride / 2 + p * stride);
  return idx;
}

std::vector<Index> ReactionDiffusionSolver::observed_steps() const {
  const Index stride = cfg_.steps / cfg_.obs_t;
  std::vector<Index> idx;
  for (Index k = 1; k <= cfg_.obs_t; ++k) idx.push_back(k * stride);
  return idx;
}

Matrix ReactionDiffusionSolver::solve(const Vector& source, double* max_residual) const {
  const Index nx = cfg_.nodes;
  if (source.size() != nx) throw ConfigError("reaction-diffusion: source has wrong size");
  if (!source.allFinite()) throw ModelDomainError("reaction-diffusion: non-finite source");

  const std::size_t m = static_cast<std::size_t>(nx - 2);
  const double h = 1.0 / static_cast<double>(nx - 1);
  const double dt = cfg_.t_final / static_cast<double>(cfg_.steps);
  const double theta = cfg_.scheme == TimeScheme::kBackwardEuler ? 1.0 : 0.5;
  const double dd = cfg_.diffusion / (h * h);
  const double g = cfg_.reaction;

  Matrix traj = Matrix::Zero(cfg_.steps + 1, nx);
  std::vector<double> s(m, 0.0), old(m), explicit_part(m), res(m), diag(m);
  double worst = 0.0;

  auto rate = [&](const std::vector<double>& v, std::size_t i) {
    const double left = i > 0 ? v[i - 1] : 0.0;
    const double right = i + 1 < m ? v[i + 1] : 0.0;
    return dd * (left - 2.0 * v[i] + right) + g * v[i] * v[i] + source(static_cast<Index>(i) + 1);
  };

  for (Index n = 1; n <= cfg_.steps; ++n) {
    old = s;
    for (std::size_t i = 0; i < m; ++i)
      explicit_part[i] = old[i] + (1.0 - theta) * dt * rate(old, i);

    bool converged = false;
    double norm = 0.0;
    for (int it = 0; it <= cfg_.newton_max_iter; ++it) {
      norm = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        res[i] = s[i] - explicit_part[i] - theta * dt * rate(s, i);
        norm = std::max(norm, std::abs(res[i]));
      }
      if (!std::isfinite(norm)) break;
      if (norm <= cfg_.newton_tol) {
        converged = true;
        break;
      }
      if (it == cfg_.newton_max_iter) break;
      for (std::size_t i = 0; i < m; ++i) {
        diag[i] = 1.0 - theta * dt * (-2.0 * dd + 2.0 * g * s[i]);
        res[i] = -res[i];
      }
      solve_tridiagonal(diag, -theta * dt * dd, res);
      for (std::size_t i = 0; i < m; ++i) s[i] += res[i];
    }
    if (!converged)
      throw ModelDomainError("reaction-diffusion: Newton did not converge at step " +
                             std::to_string(n) + " (residual " + std::to_string(norm) + ")");
    worst = std::max(worst, norm);
    for (std::size_t i = 0; i < m; ++i) traj(n, static_cast<Index>(i) + 1) = s[i];
  }
  if (max_residual) *max_residual = worst;
  return traj;
}

Vector ReactionDiffusionSolver::observe(const Matrix& trajectory) const {
  const auto xs = observed_nodes();
  const auto ts = observed_steps();
  Vector obs(static_cast<Index>(xs.size() * ts.size()));
  Index k = 0;
  for (Index t : ts)
    for (Index x : xs) obs(k++) = trajectory(t, x);
  return obs;
}

}  // namespace skt::models
