#pragma once

#include <stdexcept>
#include <string>

namespace isslab {

/// Error categories shared by the C++ core and the C API.
enum class ErrorCode : int {
  kOk = 0,
  kDomain = 1,
  kDimension = 2,
  kIteration = 3,
  kDivergence = 4,
  kConfig = 5,
  kIo = 6,
  kInternal = 7,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

/// Grid or array sizes that do not match.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::kDimension, what) {}
};

/// A fixed-point iteration hit its cap before reaching tolerance.
class IterationError : public Error {
 public:
  IterationError(const std::string& what, double last_residual, int iterations)
      : Error(ErrorCode::kIteration, what),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

/// A simulation produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(ErrorCode::kDivergence, what), time_(time) {}

  /// First simulation time at which a non-finite value was seen.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace isslab
