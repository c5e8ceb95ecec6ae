#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vddc {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A scenario, menu or config block breaks one of its invariants.
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// Malformed config text.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

// Requested displacement exceeds what the airframe can fly in one slot.
class SpeedViolation : public Error {
public:
  using Error::Error;
};

// Shannon capacity underflowed to zero: the UAV cannot reach the GCS.
class ZeroCapacity : public Error {
public:
  using Error::Error;
};

// Grid oracle refused an instance with too many eligible types.
class TooManyTypes : public Error {
public:
  using Error::Error;
};

// A solver failed while producing one scheme of an experiment.
class SolverError : public Error {
public:
  using Error::Error;
};

// Convergence window longer than the recorded log.
class InsufficientData : public Error {
public:
  using Error::Error;
};

} // namespace vddc
