#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace polyctrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke a documented precondition (dimension mismatch, bad range).
class ContractViolation : public Error {
public:
  using Error::Error;
};

// Bad configuration / usage; maps to CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

// A time stepper failed; carries the step index at which it happened.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, int step) : Error(what), step_index(step) {}
  int step_index;
};

// State left the representable range (NaN/Inf) during integration.
class DivergenceError : public IntegrationError {
public:
  using IntegrationError::IntegrationError;
};

// Non-finite or otherwise unusable data encountered.
class DataError : public Error {
public:
  using Error::Error;
};

// A configured resource cap (cardinality, factorization size) was exceeded.
class ResourceError : public Error {
public:
  using Error::Error;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polyctrl
