#pragma once

#include <memory>
#include <string>

#include "skt/linalg.hpp"
#include "skt/types.hpp"

namespace skt {

// Bijective reparametrisation z = f(x) fitted to an ensemble. Samplers work
// against this interface only, so a trainable flow can replace the affine map
// without touching them. Fitted maps are immutable and safe for concurrent
// reads.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;

  virtual std::string name() const = 0;
  virtual void fit(const RowMatrix& states) = 0;
  virtual Vector forward(const Vector& x) const = 0;
  virtual Vector inverse(const Vector& z) const = 0;
  // log |det ∂f^{-1}(z)/∂z|
  virtual double log_det_jacobian_inverse(const Vector& z) const = 0;

  RowMatrix forward_all(const RowMatrix& states) const;
  RowMatrix inverse_all(const RowMatrix& latent) const;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  std::string name() const override { return "identity"; }
  void fit(const RowMatrix&) override {}
  Vector forward(const Vector& x) const override { return x; }
  Vector inverse(const Vector& z) const override { return z; }
  double log_det_jacobian_inverse(const Vector&) const override { return 0.0; }
};

// x = mean + L z with Cov = L L^T.
struct AffineMap {
  Vector mean;
  Matrix lower;
};

// Moment-matched affine map: mean = ensemble mean, L = Cholesky of the
// ensemble covariance (jitter policy applies).
AffineMap fit_affine(const RowMatrix& states);

// Σ_k log L_kk; constant in z.
double logdet_inverse(const AffineMap& map);

class AffinePreconditioner final : public Preconditioner {
 public:
  AffinePreconditioner() = default;
  explicit AffinePreconditioner(AffineMap map);

  std::string name() const override { return "affine"; }
  void fit(const RowMatrix& states) override;
  Vector forward(const Vector& x) const override;
  Vector inverse(const Vector& z) const override;
  double log_det_jacobian_inverse(const Vector&) const override { return log_det_; }

  const AffineMap& map() const { return map_; }

 private:
  AffineMap map_;
  double log_det_ = 0.0;
};

std::unique_ptr<Preconditioner> make_preconditioner(const std::string& name);

}  // namespace skt
