#pragma once

#include <stdexcept>
#include <string>

namespace ocm {

// Base of every error the library throws. `kind()` is a stable machine-readable tag
// used by the CLI when it serializes failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Invalid or inconsistent configuration. `field()` is the dotted path of the offending
// entry (e.g. "grid.dx"), empty when the problem is not tied to one field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config", field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class SingularSystemError : public Error {
 public:
  explicit SingularSystemError(const std::string& message) : Error("singular_system", message) {}
};

// A solve produced non-finite values, typically an explicit step outside its stable range.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message) : Error("numerical", message) {}
};

class InsufficientSamplesError : public Error {
 public:
  explicit InsufficientSamplesError(const std::string& message)
      : Error("insufficient_samples", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace ocm
