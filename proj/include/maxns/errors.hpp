#pragma once

#include <stdexcept>
#include <string>

namespace maxns {

// Bad user-supplied configuration or out-of-contract arguments.  The message
// names the offending field/argument.  The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure could not meet its guarantees (singular Gramian,
// violated simplicity, unstable step size, ...).  The CLI maps this to exit
// code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maxns
