#include "skt/models/kl_basis.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <vector>

#include "skt/io.hpp"

namespace skt::models {

std::string kernel_name(KernelKind kind) {
  return kind == KernelKind::kSquaredExponential ? "squared_exponential" : "matern32";
}

double kernel_value(KernelKind kind, double r, double ell) {
  if (kind == KernelKind::kSquaredExponential) return std::exp(-0.5 * r * r / (ell * ell));
  const double a = std::sqrt(3.0) * r / ell;
  return (1.0 + a) * std::exp(-a);
}

Vector KLBasis::field(double mean, double sigma, const Vector& theta) const {
  if (theta.size() != order()) throw ConfigError("KL field: coefficient count mismatch");
  const Vector scaled = eigenvalues.cwiseSqrt().cwiseProduct(theta);
  Vector f = eigenfunctions * scaled;
  f *= sigma;
  f.array() += mean;
  return f;
}

void top_eigenpairs(const Matrix& sym, Index order, Vector& values, Matrix& vectors) {
  const Index n = sym.rows();
  if (sym.cols() != n) throw ConfigError("eigenproblem: matrix is not square");
  if (order < 1 || order > n)
    throw ConfigError("KL order " + std::to_string(order) + " exceeds grid size " + std::to_string(n));

  Matrix a = sym;
  std::vector<double> w(static_cast<std::size_t>(n));
  Matrix z(n, order);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(order));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), 0.0, 0.0, static_cast<lapack_int>(n - order + 1),
      static_cast<lapack_int>(n), 0.0, &found, w.data(), z.data(), static_cast<lapack_int>(n),
      support.data());
  if (info != 0 || found != order)
    throw NumericalError("eigenproblem: LAPACK dsyevr failed (info " + std::to_string(info) + ")");

  // dsyevr returns ascending order.
  values.resize(order);
  vectors.resize(n, order);
  for (Index k = 0; k < order; ++k) {
    values(k) = w[static_cast<std::size_t>(order - 1 - k)];
    vectors.col(k) = z.col(order - 1 - k);
    // Fix the sign so results do not depend on LAPACK internals.
    Index pivot;
    vectors.col(k).cwiseAbs().maxCoeff(&pivot);
    if (vectors(pivot, k) < 0.0) vectors.col(k) *= -1.0;
  }

  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * values(0);
  Index usable = 0;
  while (usable < order && values(usable) > tol) ++usable;
  if (usable < order)
    throw ConfigError("KL order " + std::to_string(order) + " exceeds the numerically positive spectrum; usable rank is " +
                      std::to_string(usable));
}

namespace {

Matrix gram_1d(KernelKind kind, const Vector& axis, double ell) {
  const Index n = axis.size();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) k(i, j) = kernel_value(kind, std::abs(axis(i) - axis(j)), ell);
  return k;
}

Matrix gram_2d(KernelKind kind, const Vector& axis, double ell) {
  const Index n = axis.size();
  const Index m = n * n;
  Matrix k(m, m);
  for (Index p = 0; p < m; ++p) {
    const double x1 = axis(p / n);
    const double x2 = axis(p % n);
    for (Index q = 0; q <= p; ++q) {
      const double dx = x1 - axis(q / n);
      const double dy = x2 - axis(q % n);
      const double v = kernel_value(kind, std::sqrt(dx * dx + dy * dy), ell);
      k(p, q) = v;
      k(q, p) = v;
    }
  }
  return k;
}

}  // namespace

KLBasis build_se_basis(const Vector& axis, double ell, Index order) {
  const Index n = axis.size();
  const Index m = n * n;
  if (order > m) throw ConfigError("KL order exceeds grid size");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram_1d(KernelKind::kSquaredExponential, axis, ell));
  if (solver.info() != Eigen::Success) throw NumericalError("1-d SE eigenproblem failed");
  const Vector mu = solver.eigenvalues();
  const Matrix v = solver.eigenvectors();

  struct Pair {
    double value;
    Index a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(m));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) pairs.push_back({mu(a) * mu(b), a, b});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
    if (l.value != r.value) return l.value > r.value;
    if (l.a != r.a) return l.a > r.a;
    return l.b > r.b;
  });

  const double tol = static_cast<double>(m) * std::numeric_limits<double>::epsilon() * pairs[0].value;
  Index usable = 0;
  while (usable < order && pairs[static_cast<std::size_t>(usable)].value > tol) ++usable;
  if (usable < order)
    throw ConfigError("KL order " + std::to_string(order) + " exceeds the numerically positive spectrum; usable rank is " +
                      std::to_string(usable));

  KLBasis basis;
  basis.kernel = KernelKind::kSquaredExponential;
  basis.length_scale = ell;
  basis.axis = axis;
  basis.eigenvalues.resize(order);
  basis.eigenfunctions.resize(m, order);
  const double grid = static_cast<double>(m);
  for (Index k = 0; k < order; ++k) {
    const Pair& p = pairs[static_cast<std::size_t>(k)];
    basis.eigenvalues(k) = p.value / grid;
    Vector col(m);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) col(i * n + j) = v(i, p.a) * v(j, p.b);
    Index pivot;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < 0.0) col = -col;
    basis.eigenfunctions.col(k) = std::sqrt(grid) * col;
  }
  return basis;
}

KLBasis build_direct_basis(KernelKind kind, const Vector& axis, double ell, Index order) {
  const Index m = axis.size() * axis.size();
  Vector values;
  Matrix vectors;
  top_eigenpairs(gram_2d(kind, axis, ell), order, values, vectors);
  KLBasis basis;
  basis.kernel = kind;
  basis.length_scale = ell;
  basis.axis = axis;
  const double grid = static_cast<double>(m);
  basis.eigenvalues = values / grid;
  basis.eigenfunctions = std::sqrt(grid) * vectors;
  return basis;
}

KLBasis interpolate_basis(const KLBasis& basis, const Vector& target) {
  const Vector& src = basis.axis;
  const Index n = src.size();
  const Index t = target.size();
  // Per-axis bracketing index and weight, clamped to the source range.
  std::vector<Index> lo(static_cast<std::size_t>(t));
  std::vector<double> frac(static_cast<std::size_t>(t));
  for (Index i = 0; i < t; ++i) {
    const double x = std::clamp(target(i), src(0), src(n - 1));
    Index k = static_cast<Index>(std::upper_bound(src.data(), src.data() + n, x) - src.data()) - 1;
    k = std::clamp<Index>(k, 0, n - 2);
    lo[static_cast<std::size_t>(i)] = k;
    frac[static_cast<std::size_t>(i)] = (x - src(k)) / (src(k + 1) - src(k));
  }

  KLBasis out;
  out.kernel = basis.kernel;
  out.length_scale = basis.length_scale;
  out.axis = target;
  out.eigenvalues = basis.eigenvalues;
  out.eigenfunctions.resize(t * t, basis.order());
  for (Index i = 0; i < t; ++i) {
    const Index a = lo[static_cast<std::size_t>(i)];
    const double fa = frac[static_cast<std::size_t>(i)];
    for (Index j = 0; j < t; ++j) {
      const Index b = lo[static_cast<std::size_t>(j)];
      const double fb = frac[static_cast<std::size_t>(j)];
      out.eigenfunctions.row(i * t + j) =
          (1 - fa) * (1 - fb) * basis.eigenfunctions.row(a * n + b) +
          (1 - fa) * fb * basis.eigenfunctions.row(a * n + b + 1) +
          fa * (1 - fb) * basis.eigenfunctions.row((a + 1) * n + b) +
          fa * fb * basis.eigenfunctions.row((a + 1) * n + b + 1);
    }
  }
  return out;
}

std::string basis_key(KernelKind kind, const Vector& axis, double ell, Index order) {
  std::string desc = "kernel=" + kernel_name(kind) + ";ell=" + io::format_double(ell) +
                     ";order=" + std::to_string(order) + ";axis=";
  for (Index i = 0; i < axis.size(); ++i) desc += io::format_double(axis(i)) + ",";
  return io::sha256_hex(desc).substr(0, 16);
}

namespace {
constexpr char kMagic[8] = {'S', 'K', 'T', 'K', 'L', 'B', '0', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::ifstream& in, T& v, const std::filesystem::path& path) {
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError(path.string() + ": truncated basis file");
}
}  // namespace

void save_basis(const std::filesystem::path& path, const KLBasis& basis) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(tmp + ": cannot open for writing");
    out.write(kMagic, sizeof(kMagic));
    put(out, static_cast<std::int32_t>(basis.kernel));
    put(out, basis.length_scale);
    put(out, static_cast<std::int64_t>(basis.axis.size()));
    put(out, static_cast<std::int64_t>(basis.grid_points()));
    put(out, static_cast<std::int64_t>(basis.order()));
    out.write(reinterpret_cast<const char*>(basis.axis.data()), basis.axis.size() * 8);
    out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()), basis.order() * 8);
    out.write(reinterpret_cast<const char*>(basis.eigenfunctions.data()),
              basis.eigenfunctions.size() * 8);
    if (!out) throw IoError(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

KLBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open basis file");
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
    throw IoError(path.string() + ": not a basis file");
  std::int32_t kind;
  std::int64_t n_axis, n_grid, order;
  KLBasis b;
  get(in, kind, path);
  get(in, b.length_scale, path);
  get(in, n_axis, path);
  get(in, n_grid, path);
  get(in, order, path);
  if (n_axis < 0 || n_grid != n_axis * n_axis || order < 0 || order > n_grid)
    throw IoError(path.string() + ": inconsistent basis header");
  b.kernel = static_cast<KernelKind>(kind);
  b.axis.resize(n_axis);
  b.eigenvalues.resize(order);
  b.eigenfunctions.resize(n_grid, order);
  if (!in.read(reinterpret_cast<char*>(b.axis.data()), n_axis * 8) ||
      !in.read(reinterpret_cast<char*>(b.eigenvalues.data()), order * 8) ||
      !in.read(reinterpret_cast<char*>(b.eigenfunctions.data()), n_grid * order * 8))
    throw IoError(path.string() + ": truncated basis file");
  return b;
}

KLBasis cached_basis(const std::filesystem::path& cache_dir, KernelKind kind, const Vector& axis,
                     double ell, Index order, bool separable) {
  auto build = [&] {
    return separable ? build_se_basis(axis, ell, order) : build_direct_basis(kind, axis, ell, order);
  };
  if (cache_dir.empty()) return build();
  const auto path = cache_dir / ("basis-" + basis_key(kind, axis, ell, order) + ".bin");
  if (std::filesystem::exists(path)) return load_basis(path);
  KLBasis b = build();
  save_basis(path, b);
  return b;
}

HilbertBasis::HilbertBasis(double half_width, Index order, const Vector& points)
    : half_width(half_width) {
  if (!(half_width > 0.0) || order < 1) throw ConfigError("Hilbert basis: invalid domain or order");
  sqrt_lambda.resize(order);
  phi.resize(points.size(), order);
  const double norm = std::sqrt(1.0 / half_width);
  for (Index j = 0; j < order; ++j) {
    sqrt_lambda(j) = static_cast<double>(j + 1) * std::numbers::pi / (2.0 * half_width);
    for (Index p = 0; p < points.size(); ++p)
      phi(p, j) = norm * std::sin(sqrt_lambda(j) * (points(p) + half_width));
  }
}

Vector HilbertBasis::spectral_weights(double alpha, double ell) const {
  const double c = alpha * std::sqrt(2.0 * std::numbers::pi) * ell;
  return (c * (-0.5 * ell * ell * sqrt_lambda.array().square()).exp()).sqrt().matrix();
}

Vector HilbertBasis::field(double mean, double alpha, double ell, const Vector& theta) const {
  if (theta.size() != order()) throw ConfigError("Hilbert field: coefficient count mismatch");
  Vector f = phi * spectral_weights(alpha, ell).cwiseProduct(theta);
  f.array() += mean;
  return f;
}

}  // namespace skt::models
