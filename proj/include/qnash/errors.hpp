#pragma once

#include <stdexcept>
#include <string>

namespace qnash {

// Base of every error thrown by the library. Callers that only need to
// distinguish "bad input" from everything else can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented invariant (non-unitary matrix, profile off
// the simplex, point outside a hull, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnash
