#pragma once

#include <stdexcept>
#include <string>

namespace roughldp {

// Raised when an adaptive rule or an iterative factorization cannot reach
// the requested accuracy. Domain and shape errors use the std exceptions
// (std::domain_error, std::invalid_argument).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace roughldp
