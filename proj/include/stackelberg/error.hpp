#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stackelberg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
  kDimensionMismatch,
  kInvalidArgument,
  kUnsupported,
  kInfeasible,
  kDomain,
  kNonConvergence,
  kIo,
  kConfig,
};

const char* ToString(ErrorKind kind);

// Every failure surfaced by the library carries a kind so callers can branch
// on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Like Error, but records the final constraint violation of an iterative
// routine that ran out of iterations.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::kNonConvergence, what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace stackelberg
