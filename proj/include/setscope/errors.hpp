#pragma once

#include <stdexcept>
#include <string>

namespace setscope {

/// Base for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file, line or payload could not be parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Input arrived out of order, or repeats a key that was already accepted.
class OrderError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// The resource already exists (e.g. a session id that is taken).
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace setscope
