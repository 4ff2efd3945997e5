#pragma once

#include <stdexcept>
#include <string>

namespace topoid {

/// Raised when a numerical routine cannot produce a trustworthy answer
/// (non-convergence, singular factorization, contract violation detected
/// mid-computation). Precondition failures on user input use
/// std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The least-squares Gram matrix is numerically singular.
class InsufficientExcitation : public NumericalError {
 public:
  explicit InsufficientExcitation(const std::string& what) : NumericalError(what) {}
};

/// File could not be read or written; the message names the path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace topoid
