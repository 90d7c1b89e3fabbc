#pragma once

#include <stdexcept>
#include <string>

namespace sumdca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf input, or an undefined value such as a zero-norm normalization.
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class DataErrorKind {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kShapeInconsistency,
  kNonFinite,
  kMalformed,
};

/// Problems reading or validating files (datasets, checkpoints, configs).
class DataError : public Error {
 public:
  DataError(DataErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  DataErrorKind kind() const noexcept { return kind_; }

 private:
  DataErrorKind kind_;
};

}  // namespace sumdca
