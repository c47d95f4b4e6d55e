#pragma once

#include <stdexcept>
#include <string>

namespace s2s {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid shapes disagree, or a size precondition (divisibility, minimum
/// extent) does not hold.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed S2SG file: bad magic, unsupported version or kind, truncated
/// payload, implausible dimensions, or non-binary mask payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace s2s
