#pragma once

#include <stdexcept>
#include <string>

namespace qgeo {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// A scalar function was applied outside its domain (e.g. log of a negative
/// eigenvalue), or a clamped quantity fell outside its interval by more than
/// the rejection tolerance.
class MatrixDomainError : public Error {
 public:
  using Error::Error;
};

class OutsideBallError : public Error {
 public:
  using Error::Error;
};

class TraceNotOneError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class NotPureError : public Error {
 public:
  using Error::Error;
};

/// The second argument of the quantum divergence must have full rank.
class SingularSecondArgumentError : public Error {
 public:
  using Error::Error;
};

class NotOnSphereError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class NotCompletelyPositiveError : public Error {
 public:
  NotCompletelyPositiveError(const std::string& what, double min_choi_eigenvalue)
      : Error(what), min_choi_eigenvalue_(min_choi_eigenvalue) {}
  double min_choi_eigenvalue() const { return min_choi_eigenvalue_; }

 private:
  double min_choi_eigenvalue_;
};

class NotTracePreservingError : public Error {
 public:
  using Error::Error;
};

/// File/JSON/CSV input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgeo
