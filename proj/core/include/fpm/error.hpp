#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpm {

/// Broad failure category. The CLI maps each kind to a distinct exit code.
enum class ErrorKind {
  Validation,  // bad argument, shape mismatch, invariant violation
  Geometry,    // illumination grid does not fit the spectrum
  Io,          // unreadable/unwritable file
  Format,      // malformed .fpc / manifest contents
  Numerical,   // non-finite values during iteration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error(ErrorKind::Geometry, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

enum class FormatErrorCode {
  BadMagic,
  VersionMismatch,
  Truncated,
  ChecksumMismatch,
  BadMetadata,
  TrailingData,
};

class FormatError : public Error {
 public:
  FormatError(FormatErrorCode code, const std::string& what)
      : Error(ErrorKind::Format, what), code_(code) {}
  FormatErrorCode code() const noexcept { return code_; }

 private:
  FormatErrorCode code_;
};

class NumericalError : public Error {
 public:
  NumericalError(std::size_t sweep, const std::string& what)
      : Error(ErrorKind::Numerical, what), sweep_(sweep) {}
  /// Zero-based sweep in which the failure was detected.
  std::size_t sweep() const noexcept { return sweep_; }

 private:
  std::size_t sweep_;
};

}  // namespace fpm
