#pragma once

#include <string>
#include <vector>

#include "skt/ensemble.hpp"
#include "skt/linalg.hpp"

namespace skt::models {

enum class Transform { kIdentity, kLog };

// One block of the parameter vector. Positive-support distributions
// (HalfNormal, InverseGamma) are always sampled in log space; their log
// density then includes the Jacobian term +ζ for ζ = log v.
struct PriorComponent {
  enum class Kind { kNormal, kHalfNormal, kInverseGamma, kStdNormalBlock };

  std::string name;
  Kind kind = Kind::kNormal;
  double a = 0.0;  // Normal: mean; HalfNormal: sigma; InverseGamma: shape
  double b = 1.0;  // Normal: sigma; InverseGamma: scale
  Transform transform = Transform::kIdentity;
  Index size = 1;

  static PriorComponent normal(std::string name, double mean, double sigma);
  static PriorComponent half_normal_log(std::string name, double sigma);
  static PriorComponent inverse_gamma_log(std::string name, double shape, double scale);
  static PriorComponent std_normal_block(std::string name, Index size);

  // Log density of the constrained value v (no Jacobian).
  double log_density_constrained(double v) const;
};

// Independent product prior over consecutive blocks.
class ProductPrior final : public Prior {
 public:
  explicit ProductPrior(std::vector<PriorComponent> components);

  Index dim() const override { return dim_; }
  Vector sample(Rng& rng) const override;
  double log_density(const Vector& x) const override;

  // Maps unconstrained coordinates to constrained values (exp on log blocks).
  Vector constrained(const Vector& x) const;
  const std::vector<PriorComponent>& components() const { return components_; }
  // Offset of the named component; throws ConfigError when absent.
  Index offset(const std::string& name) const;

 private:
  std::vector<PriorComponent> components_;
  Index dim_ = 0;
};

// Dense multivariate normal prior N(mean, cov).
class GaussianPrior final : public Prior {
 public:
  GaussianPrior(Vector mean, Matrix cov);

  Index dim() const override { return mean_.size(); }
  Vector sample(Rng& rng) const override;
  double log_density(const Vector& x) const override;

  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

 private:
  Vector mean_;
  Matrix cov_;
  CholeskyFactor chol_;
};

}  // namespace skt::models
