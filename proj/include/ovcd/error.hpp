#pragma once

#include <stdexcept>
#include <string>

namespace ovcd {

// Root of the engine's exception hierarchy. Callers that only care about
// "something in the engine failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Any failure reported by (or while talking to) a segmentation/feature/tracking
// backend. Subclasses distinguish the remote failure modes.
class BackendError : public Error {
 public:
  using Error::Error;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class SchemaViolation : public BackendError {
 public:
  using BackendError::BackendError;
};

class ServerError : public BackendError {
 public:
  ServerError(const std::string& what, int status)
      : BackendError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace ovcd
