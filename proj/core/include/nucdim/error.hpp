#pragma once

#include <stdexcept>
#include <string>

namespace nucdim {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input documents or literals.
class ParseError : public Error {
public:
  using Error::Error;
};

// A value violates a structural invariant (bijectivity, metric axioms, ...).
class InvariantError : public Error {
public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

} // namespace nucdim
