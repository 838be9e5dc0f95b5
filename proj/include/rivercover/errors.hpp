#pragma once

#include <stdexcept>
#include <string>

namespace rivercover {

/// Input violates a documented precondition (bad parameter, malformed document).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs are well formed but no plan can be produced (e.g. spacing does not fit).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rivercover
