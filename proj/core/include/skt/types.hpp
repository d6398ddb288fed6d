#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace skt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Ensembles and batched forward outputs are stored one particle per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// Error hierarchy. The CLI maps these onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Thrown by forward models when a parameter lies outside the solver's
// admissible region (e.g. an unstable explicit time step). Samplers treat it
// as a zero-density proposal; ensemble evaluation surfaces it as an error.
class ModelDomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace skt
