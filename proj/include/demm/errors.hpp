#pragma once

#include <stdexcept>
#include <string>

namespace demm {

// Every failure the library reports derives from Error. The CLI maps the
// concrete type to its process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

// Invalid argument or configuration (exit code 2).
class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Solver failure or numerical degeneracy (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

// Problem size exceeds what a dense/diagnostic routine accepts. Reported as a
// parameter problem since the caller picked the wrong tool for the size.
class CapabilityError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

void log_warning(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace demm
