#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dpl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (zero wavevector, bad grid, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A field was handed to an operation expecting the other representation.
class RepresentationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid run configuration. `path()` is a JSON pointer to the offending node.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A state file failed magic, header, length or checksum validation.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpl
