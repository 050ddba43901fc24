#pragma once

#include <stdexcept>
#include <string>

namespace nngp {

// Precondition or configuration violation.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// The computation itself broke down (non-PSD input, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nngp
