#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sufcast {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass onto its exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed, non-finite or mis-shaped input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Rank deficiency, singular systems and other numerical breakdowns (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

using Warnings = std::vector<std::string>;

}  // namespace sufcast
