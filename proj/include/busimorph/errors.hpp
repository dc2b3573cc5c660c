#pragma once

#include <stdexcept>
#include <string>

namespace busimorph {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad or inconsistent input data (missing files, corrupt PNGs, schema
/// mismatches). CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invariant violation inside the library itself. CLI maps to exit code 3.
class InternalError : public Error {
 public:
  using Error::Error;
};

class MissingRoot : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDataset : public DataError {
 public:
  using DataError::DataError;
};

class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class EmptyMask : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateContour : public DataError {
 public:
  using DataError::DataError;
};

class ContourTooShort : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateRegion : public DataError {
 public:
  using DataError::DataError;
};

class ClassTooSmall : public DataError {
 public:
  using DataError::DataError;
};

class BatchTooSmall : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteLoss : public DataError {
 public:
  using DataError::DataError;
};

class SchemaMismatch : public DataError {
 public:
  using DataError::DataError;
};

class CorruptModelFile : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class UnknownClass : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class SpecOutOfCanvas : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace busimorph
