#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onboard {

/// A record in an input file violates the issue schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Unreadable file or malformed configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training could not proceed: empty or single-class data, bad dimensions.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A persisted artifact does not match what it is combined with
/// (vocabulary hash mismatch, feature dimension mismatch).
class ArtifactMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace onboard
