#include "skt/linalg.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace skt {

double CholeskyFactor::log_det() const {
  return 2.0 * lower.diagonal().array().log().sum();
}

Vector CholeskyFactor::solve(const Vector& b) const {
  Vector y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
  Matrix y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector CholeskyFactor::whiten(const Vector& b) const {
  return lower.triangularView<Eigen::Lower>().solve(b);
}

CholeskyFactor jittered_cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw NumericalError("cholesky: matrix is not square");
  if (!a.allFinite()) throw NumericalError("cholesky: matrix has non-finite entries");
  const Matrix sym = 0.5 * (a + a.transpose());

  const double d = static_cast<double>(a.rows());
  const double trace = sym.trace();
  double base = (trace > 0.0 && std::isfinite(trace)) ? 1e-10 * trace / d : 1e-10;

  // Pivots at rounding level mean the matrix is singular to working precision.
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    const double min_pivot = llt.matrixL().toDenseMatrix().diagonal().minCoeff();
    if (min_pivot > 0.0 && min_pivot * min_pivot > 1e-4 * base) return {llt.matrixL(), 0.0};
  }

  for (int decade = 0; decade <= 3; ++decade) {
    const double jitter = base * std::pow(10.0, decade);
    Matrix shifted = sym;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      Matrix lower = llt.matrixL();
      if (lower.diagonal().minCoeff() > 0.0) return {std::move(lower), jitter};
    }
  }
  throw NumericalError("cholesky: factorization failed after jitter up to " +
                       std::to_string(base * 1e3));
}

Matrix psd_factor(const Matrix& a) {
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::LDLT<Matrix> ldlt(sym);
  Vector dvec = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Matrix l = ldlt.matrixL();
  Matrix ld = l * dvec.asDiagonal();
  // A = P^T L D L^T P
  return ldlt.transpositionsP().transpose() * ld;
}

}  // namespace skt
