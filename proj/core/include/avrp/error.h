#pragma once

#include <stdexcept>
#include <string>

namespace avrp {

// Root of every error raised by the library. The CLI maps subclasses to exit
// codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument combination (negative ranges, probabilities >= 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Shape or referential mismatch between matrices and catalogs.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public Error {
 public:
  using Error::Error;
};

// An object does not fit on the server it must live on.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The operation's precondition on the current placement does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The operation would break the storage or primary replica constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace avrp
