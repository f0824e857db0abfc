#pragma once

#include <stdexcept>
#include <string>

namespace qmetric {

// Violated operation precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// A configured resource cap would be exceeded (CLI exit code 3).
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative numerics failed to converge or produced non-finite values (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

#define QMETRIC_REQUIRE(cond, msg)                     \
  do {                                                 \
    if (!(cond)) throw ::qmetric::PreconditionError(msg); \
  } while (0)

}  // namespace qmetric
