#pragma once

#include <stdexcept>
#include <string>

namespace thermocal {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric precondition or model-domain violation (bad argument values,
// non-finite state, degenerate statistics).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (CSV rows, spacing, lengths).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A command was invoked before the command producing its inputs.
class MissingArtifactError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical breakdown during a run (e.g. simulation failure mid-chain).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermocal
