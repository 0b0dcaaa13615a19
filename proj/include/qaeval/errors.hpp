#pragma once

#include <stdexcept>
#include <string>

namespace qaeval {

// Input data violates a schema or invariant (bad field, duplicate key,
// dangling reference, malformed line). CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem / transport problem. CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qaeval
