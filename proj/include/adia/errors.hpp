#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adia {

/// Numerical failure: norm drift, degenerate benchmark, ill-defined CD term.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the exact counterdiabatic term is undefined because the
/// ground level sits inside a degenerate cluster.
class DegeneracyError : public NumericalError {
 public:
  DegeneracyError(const std::string& what, std::vector<double> levels)
      : NumericalError(what), levels_(std::move(levels)) {}
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> levels_;
};

/// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adia
