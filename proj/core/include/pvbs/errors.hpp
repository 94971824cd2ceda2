#pragma once

#include <stdexcept>
#include <string>

namespace pvbs {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A size limit (sites, state space, dense cap, sector dimension) was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A region does not fit into the torus it is being embedded in.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or violated preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Model parameters are unusable (nonpositive anisotropies, degenerate kernels, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// An iterative eigensolver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace pvbs
