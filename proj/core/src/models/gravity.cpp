#include "skt/models/gravity.hpp"

#include <cmath>
#include <numbers>

namespace skt::models {

Vector GravitySolver::midpoints(Index n) {
  Vector m(n);
  for (Index i = 0; i < n; ++i) m(i) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return m;
}

GravitySolver::GravitySolver(const GravityConfig& cfg) : cfg_(cfg) {
  if (cfg.quadrature < 1 || cfg.surface < 1 || !(cfg.depth > 0.0))
    throw ConfigError("gravity: quadrature, surface grid and depth must be positive");
  const Vector xq = midpoints(cfg.quadrature);
  const Vector xs = midpoints(cfg.surface);
  const Index q = cfg.quadrature;
  const Index s = cfg.surface;
  const double w = 1.0 / static_cast<double>(q * q);
  const double d2 = cfg.depth * cfg.depth;
  kernel_.resize(s * s, q * q);
  for (Index a = 0; a < s; ++a)
    for (Index b = 0; b < s; ++b)
      for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < q; ++j) {
          const double dx = xs(a) - xq(i);
          const double dy = xs(b) - xq(j);
          const double r = std::sqrt(dx * dx + dy * dy + d2);
          kernel_(a * s + b, i * q + j) = w * cfg.depth / (r * r * r);
        }
}

Vector GravitySolver::forward(const Vector& density) const {
  if (density.size() != kernel_.cols()) throw ConfigError("gravity: density has wrong size");
  return kernel_ * density;
}

Vector GravitySolver::truth_density() const {
  const Index q = cfg_.quadrature;
  const Vector x = midpoints(q);
  Vector rho(q * q);
  for (Index i = 0; i < q; ++i)
    for (Index j = 0; j < q; ++j)
      rho(i * q + j) = std::sin(std::numbers::pi * x(i)) + std::sin(3.0 * std::numbers::pi * x(j)) +
                       x(j) + 1.0;
  return rho / rho.maxCoeff();
}

}  // namespace skt::models
