#pragma once

#include <stdexcept>
#include <string>

namespace collab {

/// Malformed or out-of-range input: instance descriptions, parameters,
/// indices.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce an answer under its preconditions
/// (no sign change in a bracket, oversized oracle, non-concave objective).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace collab
