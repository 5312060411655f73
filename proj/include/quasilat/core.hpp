#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace quasilat {

/// Sup-norm tolerance under which two points are considered identical.
inline constexpr double kDedupTol = 1e-9;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;

/// Base class for every failure raised by the library. The message names the
/// violated precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be parsed (malformed CSV, config, window string).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace quasilat
