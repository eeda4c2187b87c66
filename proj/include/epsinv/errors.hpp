#pragma once

#include <stdexcept>
#include <string>

namespace epsinv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point or function argument left the unit interval / the operation's domain.
struct DomainError : Error {
  using Error::Error;
};

// An affine image left [0,1] beyond tolerance.
struct RangeError : Error {
  using Error::Error;
};

struct InvalidInput : Error {
  using Error::Error;
};

// A branch system fails the structural conditions an operation requires.
struct InvalidSystem : Error {
  using Error::Error;
};

// A stated hypothesis of a construction does not hold for the given data.
struct HypothesisViolated : Error {
  using Error::Error;
};

struct CapExceeded : Error {
  using Error::Error;
};

struct NonFiniteSample : Error {
  using Error::Error;
};

}  // namespace epsinv
