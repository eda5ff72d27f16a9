#pragma once

#include <stdexcept>
#include <string>

namespace mtlz {

// Every library failure derives from Error so the CLI can map it to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter outside the domain where a construction is defined (|tau| >= 1, gamma <= 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// Input data violate a linear constraint the construction requires.
struct ConstraintError : Error {
  using Error::Error;
};

// Edge/cycle data do not close into a consistent family.
struct IntegrabilityError : Error {
  using Error::Error;
};

// Malformed graph or argument shapes.
struct GraphError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Arrangement with coincident circles that cannot be enumerated as given.
struct DegenerateArrangement : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

// Schema problems in user-supplied files; the CLI maps these to exit code 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mtlz
