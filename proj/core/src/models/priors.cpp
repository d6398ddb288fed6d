#include "skt/models/priors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace skt::models {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

PriorComponent PriorComponent::normal(std::string name, double mean, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("prior '" + name + "': sigma must be positive");
  return {std::move(name), Kind::kNormal, mean, sigma, Transform::kIdentity, 1};
}

PriorComponent PriorComponent::half_normal_log(std::string name, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("prior '" + name + "': sigma must be positive");
  return {std::move(name), Kind::kHalfNormal, sigma, 0.0, Transform::kLog, 1};
}

PriorComponent PriorComponent::inverse_gamma_log(std::string name, double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0))
    throw ConfigError("prior '" + name + "': inverse gamma parameters must be positive");
  return {std::move(name), Kind::kInverseGamma, shape, scale, Transform::kLog, 1};
}

PriorComponent PriorComponent::std_normal_block(std::string name, Index size) {
  if (size < 1) throw ConfigError("prior '" + name + "': block size must be positive");
  return {std::move(name), Kind::kStdNormalBlock, 0.0, 1.0, Transform::kIdentity, size};
}

double PriorComponent::log_density_constrained(double v) const {
  switch (kind) {
    case Kind::kNormal: {
      const double z = (v - a) / b;
      return -0.5 * kLog2Pi - std::log(b) - 0.5 * z * z;
    }
    case Kind::kStdNormalBlock:
      return -0.5 * kLog2Pi - 0.5 * v * v;
    case Kind::kHalfNormal:
      if (v < 0.0) return -INFINITY;
      return std::log(std::sqrt(2.0 / std::numbers::pi) / a) - v * v / (2.0 * a * a);
    case Kind::kInverseGamma:
      if (v <= 0.0) return -INFINITY;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(v) - b / v;
  }
  return -INFINITY;
}

ProductPrior::ProductPrior(std::vector<PriorComponent> components)
    : components_(std::move(components)) {
  for (const auto& c : components_) {
    const bool positive = c.kind == PriorComponent::Kind::kHalfNormal ||
                          c.kind == PriorComponent::Kind::kInverseGamma;
    if (positive != (c.transform == Transform::kLog))
      throw ConfigError("prior '" + c.name + "': log transform must pair with positive support");
    dim_ += c.size;
  }
}

Vector ProductPrior::sample(Rng& rng) const {
  Vector x(dim_);
  Index k = 0;
  for (const auto& c : components_) {
    for (Index j = 0; j < c.size; ++j, ++k) {
      switch (c.kind) {
        case PriorComponent::Kind::kNormal:
          x(k) = c.a + c.b * standard_normal(rng);
          break;
        case PriorComponent::Kind::kStdNormalBlock:
          x(k) = standard_normal(rng);
          break;
        case PriorComponent::Kind::kHalfNormal:
          x(k) = std::log(c.a * std::abs(standard_normal(rng)));
          break;
        case PriorComponent::Kind::kInverseGamma: {
          std::gamma_distribution<double> g(c.a, 1.0 / c.b);
          x(k) = -std::log(g(rng));
          break;
        }
      }
    }
  }
  return x;
}

double ProductPrior::log_density(const Vector& x) const {
  if (x.size() != dim_) throw ConfigError("prior: dimension mismatch");
  double s = 0.0;
  Index k = 0;
  for (const auto& c : components_) {
    if (c.kind == PriorComponent::Kind::kStdNormalBlock) {
      s += -0.5 * kLog2Pi * static_cast<double>(c.size) - 0.5 * x.segment(k, c.size).squaredNorm();
      k += c.size;
      continue;
    }
    for (Index j = 0; j < c.size; ++j, ++k) {
      if (c.transform == Transform::kLog)
        s += c.log_density_constrained(std::exp(x(k))) + x(k);
      else
        s += c.log_density_constrained(x(k));
    }
  }
  return s;
}

Vector ProductPrior::constrained(const Vector& x) const {
  Vector v = x;
  Index k = 0;
  for (const auto& c : components_) {
    if (c.transform == Transform::kLog) v.segment(k, c.size) = x.segment(k, c.size).array().exp();
    k += c.size;
  }
  return v;
}

Index ProductPrior::offset(const std::string& name) const {
  Index k = 0;
  for (const auto& c : components_) {
    if (c.name == name) return k;
    k += c.size;
  }
  throw ConfigError("prior has no component named '" + name + "'");
}

GaussianPrior::GaussianPrior(Vector mean, Matrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)), chol_(jittered_cholesky(cov_)) {
  if (mean_.size() != cov_.rows()) throw ConfigError("Gaussian prior: shape mismatch");
}

Vector GaussianPrior::sample(Rng& rng) const {
  Vector z(mean_.size());
  for (Index k = 0; k < z.size(); ++k) z(k) = standard_normal(rng);
  return mean_ + chol_.lower.triangularView<Eigen::Lower>() * z;
}

double GaussianPrior::log_density(const Vector& x) const {
  const double q = chol_.whiten(x - mean_).squaredNorm();
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + chol_.log_det() + q);
}

}  // namespace skt::models
