#pragma once

#include "skt/types.hpp"

namespace skt {

// Lower-triangular Cholesky factor together with the diagonal jitter that was
// needed to obtain it.
struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;

  Index dim() const { return lower.rows(); }
  // log det(L L^T)
  double log_det() const;
  // Solves (L L^T) x = b.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  // Returns L^{-1} b.
  Vector whiten(const Vector& b) const;
};

// Cholesky with the jitter policy shared by every factorization in the
// library: on failure add 1e-10 * trace/d to the diagonal and retry, growing
// the jitter by a decade up to three times. Throws NumericalError when all
// attempts fail. A zero-trace input uses an absolute base jitter of 1e-10.
CholeskyFactor jittered_cholesky(const Matrix& a);

// Symmetric square-root-like factor S with S S^T = A for a positive
// semidefinite A (negative pivots clamped to zero). Zero matrix maps to zero.
Matrix psd_factor(const Matrix& a);

}  // namespace skt
