#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bqce {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy evaluation hit a degenerate configuration (coincident atoms,
/// inverted element, non-positive det F).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// How parallel sums are combined. `reproducible` scatters per-term results
/// in a fixed serial order, so results are bitwise identical to the serial
/// kernels regardless of the thread count.
enum class Reduction { fast, reproducible };

}  // namespace bqce
