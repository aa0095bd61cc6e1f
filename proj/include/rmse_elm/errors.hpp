#pragma once

#include <stdexcept>
#include <string>

namespace rmse_elm {

// Shape or index disagreement between arguments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed, missing or non-finite input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that cannot produce a meaningful result (e.g. singular system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or config file contents.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rmse_elm
