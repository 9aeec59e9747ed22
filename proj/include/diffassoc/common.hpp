#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace diffassoc {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

enum class ErrorKind {
  DegenerateData,
  BlockMismatch,
  SizeMismatch,
  DimensionMismatch,
  GroupTooSmall,
  NonPositiveVariance,
  TooLarge,
  InvalidRho,
  InvalidCaseParameter,
  FactorizationFailure,
  MalformedInput,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Rows are samples, columns are features. Throws DegenerateData on an empty
// matrix and MalformedInput on a non-finite entry.
template <typename Derived>
void check_samples(const Eigen::MatrixBase<Derived>& data, const char* name = "samples") {
  if (data.rows() < 1 || data.cols() < 1)
    throw Error(ErrorKind::DegenerateData, std::string(name) + ": empty sample matrix");
  if (!data.allFinite())
    throw Error(ErrorKind::MalformedInput, std::string(name) + ": non-finite entry");
}

}  // namespace diffassoc
