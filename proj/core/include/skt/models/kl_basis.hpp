#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "skt/types.hpp"

namespace skt::models {

enum class KernelKind { kSquaredExponential, kMatern32 };

std::string kernel_name(KernelKind kind);

// Unit-amplitude stationary kernels of the distance r.
double kernel_value(KernelKind kind, double r, double length_scale);

// Discrete Karhunen-Loeve basis on the tensor grid axis × axis (point
// (i, j) stored at row i·n + j). Nyström scaling: eigenvalues are Gram
// eigenvalues divided by N_grid and eigenfunctions are unit eigenvectors
// times sqrt(N_grid), so (1/N_grid) Σ φ_j φ_k = δ_jk. Eigenvalues are sorted
// non-increasing; separable grids produce exact ties between transposed
// modes.
struct KLBasis {
  KernelKind kernel = KernelKind::kSquaredExponential;
  double length_scale = 0.0;
  Vector axis;
  Vector eigenvalues;
  Matrix eigenfunctions;  // N_grid × R

  Index order() const { return eigenvalues.size(); }
  Index grid_points() const { return eigenfunctions.rows(); }
  // μ + σ Σ_k sqrt(λ_k) θ_k φ_k on the grid.
  Vector field(double mean, double sigma, const Vector& theta) const;
};

// Separable construction for the squared-exponential kernel: 1-d Gram
// eigenpairs, 2-d pairs as sorted products.
KLBasis build_se_basis(const Vector& axis, double length_scale, Index order);

// Direct eigendecomposition of the full N_grid × N_grid Gram matrix.
KLBasis build_direct_basis(KernelKind kind, const Vector& axis, double length_scale, Index order);

// Resamples eigenfunctions from the basis grid onto a finer tensor grid by
// bilinear interpolation. Eigenvalues are kept.
KLBasis interpolate_basis(const KLBasis& basis, const Vector& target_axis);

// Content hash of (kernel, grid, order) used to name cache files.
std::string basis_key(KernelKind kind, const Vector& axis, double length_scale, Index order);

void save_basis(const std::filesystem::path& path, const KLBasis& basis);
KLBasis load_basis(const std::filesystem::path& path);

// Looks up <cache_dir>/basis-<key>.bin and builds (and stores) it when
// missing. An empty cache_dir disables caching.
KLBasis cached_basis(const std::filesystem::path& cache_dir, KernelKind kind, const Vector& axis,
                     double length_scale, Index order, bool separable);

// Top `order` eigenpairs (descending) of a symmetric matrix. Throws
// ConfigError naming the usable rank when fewer than `order` eigenvalues are
// numerically positive.
void top_eigenpairs(const Matrix& sym, Index order, Vector& values, Matrix& vectors);

// Laplacian eigenbasis on [−L, L] with Dirichlet ends:
//   λ_j = (jπ/2L)²,  φ_j(x) = sqrt(1/L) sin(sqrt(λ_j)(x + L)).
struct HilbertBasis {
  double half_width = 1.0;
  Vector sqrt_lambda;  // length R
  Matrix phi;          // points × R

  HilbertBasis(double half_width, Index order, const Vector& points);

  Index order() const { return sqrt_lambda.size(); }
  // sqrt(S(ω_j)) with S(ω) = α sqrt(2π) ℓ exp(−ℓ²ω²/2).
  Vector spectral_weights(double alpha, double length_scale) const;
  // μ + Σ_j sqrt(S(ω_j)) θ_j φ_j at the stored points.
  Vector field(double mean, double alpha, double length_scale, const Vector& theta) const;
};

}  // namespace skt::models
