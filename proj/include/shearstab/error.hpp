#pragma once

#include <stdexcept>
#include <string>

namespace shearstab {

enum class ErrorKind {
  InvalidArgument,
  NoConvergence,
  BlowUp,
  SolverFailure,
};

/// Base class for every failure raised by the library. The kind maps
/// one-to-one onto the status codes of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::InvalidArgument, what) {}
};

class SolverFailure : public Error {
 public:
  explicit SolverFailure(const std::string& what)
      : Error(ErrorKind::SolverFailure, what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace shearstab
