#pragma once

#include <stdexcept>
#include <string>

namespace urank {

// Exit-code families used by the CLI: InputError -> 2, NumericError and
// DomainError -> 3, IoError -> 4.

/// Malformed or inconsistent user input (parse failures, invariant violations).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a mathematical function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Non-finite intermediate, non-convergence, or similar numerical failure.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class VersionError : public InputError {
public:
  using InputError::InputError;
};

class ChecksumError : public InputError {
public:
  using InputError::InputError;
};

} // namespace urank
